#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prqc/common.hpp"

namespace prqc {

enum class ProfileKind { Exponential, PowerLaw, NearestNeighbor };

// Spatial decay profile f_L(d) of the tunable interactions. `range` is the
// decay length for Exponential, the exponent for PowerLaw, and unused for
// NearestNeighbor.
struct InteractionProfile {
  ProfileKind kind = ProfileKind::NearestNeighbor;
  double range = 1.0;
};

double profile_weight(const InteractionProfile& profile, int distance);

enum class ModelKind {
  XX,               // tunable-range XX chain
  Ising,            // tunable-range Ising chain, sigma^x = (s+ + s-)/2
  BlumeCapel,       // spin-1 -J f_L Sx Sx + aniso_d (Sx)^2
  KitaevQuadratic,  // tunable-range quadratic fermions (hop + pair)
  TFIM,             // -J XX - h Z, full Pauli
  KitaevTarget,     // -t hop + delta pair - mu (n - 1/2)
  BCTarget,         // -J SxSx + aniso_d (Sx)^2 + h Sz
  AAH,              // -J hop - h cos(2 pi alpha j) Z [+ g X]
  AAHResource,      // AAH with tunable-range hopping
};

std::string model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(const std::string& name);

int local_dim(ModelKind kind);     // 2 or 3; fermionic kinds report 2
bool is_fermionic(ModelKind kind);
bool is_resource(ModelKind kind);  // usable as a circuit resource
bool has_profile(ModelKind kind);
bool conserves_magnetization(ModelKind kind);  // when the g coupling is absent

struct HamiltonianSpec {
  ModelKind kind = ModelKind::TFIM;
  int n_sites = 2;
  std::map<std::string, double> couplings;
  InteractionProfile profile;

  double coupling(const std::string& name) const;
  double coupling_or(const std::string& name, double fallback) const;
};

// Canonical constructors for the models used throughout.
HamiltonianSpec tfim(int n, double j, double h);
HamiltonianSpec kitaev_target(int n, double t, double delta, double mu);
HamiltonianSpec bc_target(int n, double j, double aniso_d, double h);
HamiltonianSpec aah(int n, double j, double h, double alpha, double g = 0.0);
HamiltonianSpec pr_xx(int n, double j, InteractionProfile p);
HamiltonianSpec pr_ising(int n, double j, InteractionProfile p);
HamiltonianSpec pr_blume_capel(int n, double j, double aniso_d, InteractionProfile p);
HamiltonianSpec pr_kitaev(int n, double j, InteractionProfile p);
HamiltonianSpec pr_aah(int n, double j, double h, double alpha, InteractionProfile p,
                       double g = 0.0);

enum class TermKind {
  PairXX,      // sigma^x_i sigma^x_j, full Pauli
  PairXhXh,    // (sigma^x_i/2)(sigma^x_j/2), the Ising-resource convention
  PairHop,     // s+_i s-_j + s-_i s+_j
  PairSxSx,    // spin-1 Sx_i Sx_j
  SiteZ,       // sigma^z
  SiteX,       // sigma^x
  SiteSz,      // spin-1 Sz
  SiteSxSq,    // spin-1 (Sx)^2
  FermHop,     // c+_i c_j + c+_j c_i
  FermPair,    // c+_j c+_i + c_i c_j  (i < j)
  FermNumHalf, // c+_i c_i - 1/2
};

std::string term_kind_name(TermKind kind);
bool term_is_fermionic(TermKind kind);

struct Term {
  double coeff = 0.0;
  TermKind kind = TermKind::SiteZ;
  int site_i = 0;   // 1-based
  int site_j = -1;  // -1 for on-site terms

  bool is_pair() const { return site_j > 0; }
};

using TermList = std::vector<Term>;

// Full Hamiltonian of the model (interaction + on-site parts).
TermList term_list(const HamiltonianSpec& spec);

// Structure pieces used by the circuit layers. Interaction terms carry unit
// overall strength (the layer's J multiplies them); driving terms carry unit
// field scale (the layer's h multiplies them).
TermList resource_interaction_terms(const HamiltonianSpec& spec);
TermList resource_driving_terms(const HamiltonianSpec& spec);
TermList resource_aniso_terms(const HamiltonianSpec& spec);  // spin-1 only

struct ValidationIssue {
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const HamiltonianSpec& spec);
void validate_or_throw(const HamiltonianSpec& spec);

// Hash over kind, couplings and profile (size excluded: ledger keys carry N
// separately so parameters can transfer across sizes).
std::string model_fingerprint(const HamiltonianSpec& spec);

uint64_t fnv1a(const std::string& data);

}  // namespace prqc
