#include "prqc/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace prqc {

double profile_weight(const InteractionProfile& profile, int distance) {
  require(distance >= 1, ErrorCode::invalid_argument,
          "profile_weight: distance must be >= 1");
  switch (profile.kind) {
    case ProfileKind::Exponential:
      require(profile.range > 0, ErrorCode::invalid_argument,
              "profile_weight: exponential range must be > 0");
      return std::exp(-double(distance) / profile.range);
    case ProfileKind::PowerLaw:
      require(profile.range > 0, ErrorCode::invalid_argument,
              "profile_weight: power-law exponent must be > 0");
      return std::pow(double(distance), -profile.range);
    case ProfileKind::NearestNeighbor:
      return distance == 1 ? 1.0 : 0.0;
  }
  throw Error(ErrorCode::invalid_argument, "profile_weight: bad profile kind");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::XX: return "XX";
    case ModelKind::Ising: return "Ising";
    case ModelKind::BlumeCapel: return "BlumeCapel";
    case ModelKind::KitaevQuadratic: return "KitaevQuadratic";
    case ModelKind::TFIM: return "TFIM";
    case ModelKind::KitaevTarget: return "KitaevTarget";
    case ModelKind::BCTarget: return "BCTarget";
    case ModelKind::AAH: return "AAH";
    case ModelKind::AAHResource: return "AAHResource";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::XX, ModelKind::Ising, ModelKind::BlumeCapel,
                      ModelKind::KitaevQuadratic, ModelKind::TFIM,
                      ModelKind::KitaevTarget, ModelKind::BCTarget,
                      ModelKind::AAH, ModelKind::AAHResource}) {
    if (model_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

int local_dim(ModelKind kind) {
  return (kind == ModelKind::BlumeCapel || kind == ModelKind::BCTarget) ? 3 : 2;
}

bool is_fermionic(ModelKind kind) {
  return kind == ModelKind::KitaevQuadratic || kind == ModelKind::KitaevTarget;
}

bool is_resource(ModelKind kind) {
  switch (kind) {
    case ModelKind::XX:
    case ModelKind::Ising:
    case ModelKind::BlumeCapel:
    case ModelKind::KitaevQuadratic:
    case ModelKind::AAHResource:
      return true;
    default:
      return false;
  }
}

bool has_profile(ModelKind kind) { return is_resource(kind); }

bool conserves_magnetization(ModelKind kind) {
  return kind == ModelKind::XX || kind == ModelKind::AAH ||
         kind == ModelKind::AAHResource;
}

double HamiltonianSpec::coupling(const std::string& name) const {
  auto it = couplings.find(name);
  require(it != couplings.end(), ErrorCode::invalid_argument,
          "missing coupling " + name + " for " + model_kind_name(kind));
  return it->second;
}

double HamiltonianSpec::coupling_or(const std::string& name, double fallback) const {
  auto it = couplings.find(name);
  return it == couplings.end() ? fallback : it->second;
}

HamiltonianSpec tfim(int n, double j, double h) {
  return {ModelKind::TFIM, n, {{"J", j}, {"h", h}}, {}};
}

HamiltonianSpec kitaev_target(int n, double t, double delta, double mu) {
  return {ModelKind::KitaevTarget, n, {{"t", t}, {"delta", delta}, {"mu", mu}}, {}};
}

HamiltonianSpec bc_target(int n, double j, double aniso_d, double h) {
  return {ModelKind::BCTarget, n, {{"J", j}, {"aniso_d", aniso_d}, {"h", h}}, {}};
}

HamiltonianSpec aah(int n, double j, double h, double alpha, double g) {
  HamiltonianSpec s{ModelKind::AAH, n, {{"J", j}, {"h", h}, {"alpha", alpha}}, {}};
  if (g != 0.0) s.couplings["g"] = g;
  return s;
}

HamiltonianSpec pr_xx(int n, double j, InteractionProfile p) {
  return {ModelKind::XX, n, {{"J", j}}, p};
}

HamiltonianSpec pr_ising(int n, double j, InteractionProfile p) {
  return {ModelKind::Ising, n, {{"J", j}}, p};
}

HamiltonianSpec pr_blume_capel(int n, double j, double aniso_d, InteractionProfile p) {
  return {ModelKind::BlumeCapel, n, {{"J", j}, {"aniso_d", aniso_d}}, p};
}

HamiltonianSpec pr_kitaev(int n, double j, InteractionProfile p) {
  return {ModelKind::KitaevQuadratic, n, {{"J", j}}, p};
}

HamiltonianSpec pr_aah(int n, double j, double h, double alpha,
                       InteractionProfile p, double g) {
  HamiltonianSpec s{ModelKind::AAHResource, n,
                    {{"J", j}, {"h", h}, {"alpha", alpha}}, p};
  if (g != 0.0) s.couplings["g"] = g;
  return s;
}

std::string term_kind_name(TermKind kind) {
  switch (kind) {
    case TermKind::PairXX: return "XX";
    case TermKind::PairXhXh: return "XhXh";
    case TermKind::PairHop: return "hop";
    case TermKind::PairSxSx: return "SxSx";
    case TermKind::SiteZ: return "Z";
    case TermKind::SiteX: return "X";
    case TermKind::SiteSz: return "Sz";
    case TermKind::SiteSxSq: return "Sx^2";
    case TermKind::FermHop: return "fhop";
    case TermKind::FermPair: return "fpair";
    case TermKind::FermNumHalf: return "n-1/2";
  }
  return "?";
}

bool term_is_fermionic(TermKind kind) {
  return kind == TermKind::FermHop || kind == TermKind::FermPair ||
         kind == TermKind::FermNumHalf;
}

namespace {

// Appends one term per ordered pair i < j, weighted by the decay profile.
// Zero weights (NN beyond distance 1) are dropped.
void append_pair_terms(TermList& terms, const HamiltonianSpec& spec,
                       TermKind kind, double strength) {
  for (int i = 1; i <= spec.n_sites; ++i) {
    for (int j = i + 1; j <= spec.n_sites; ++j) {
      double w = profile_weight(spec.profile, j - i);
      if (w == 0.0) continue;
      terms.push_back({strength * w, kind, i, j});
    }
  }
}

void append_aah_field(TermList& terms, const HamiltonianSpec& spec) {
  double h = spec.coupling("h");
  double alpha = spec.coupling("alpha");
  for (int j = 1; j <= spec.n_sites; ++j) {
    terms.push_back({-h * std::cos(2.0 * kPi * alpha * j), TermKind::SiteZ, j});
  }
  double g = spec.coupling_or("g", 0.0);
  if (g != 0.0) {
    for (int j = 1; j <= spec.n_sites; ++j)
      terms.push_back({g, TermKind::SiteX, j});
  }
}

}  // namespace

TermList term_list(const HamiltonianSpec& spec) {
  validate_or_throw(spec);
  TermList terms;
  const int n = spec.n_sites;
  switch (spec.kind) {
    case ModelKind::XX:
      append_pair_terms(terms, spec, TermKind::PairHop, spec.coupling("J"));
      break;
    case ModelKind::Ising:
      append_pair_terms(terms, spec, TermKind::PairXhXh, spec.coupling("J"));
      break;
    case ModelKind::BlumeCapel: {
      append_pair_terms(terms, spec, TermKind::PairSxSx, -spec.coupling("J"));
      double d = spec.coupling("aniso_d");
      for (int i = 1; i <= n; ++i) terms.push_back({d, TermKind::SiteSxSq, i});
      break;
    }
    case ModelKind::KitaevQuadratic: {
      append_pair_terms(terms, spec, TermKind::FermHop, spec.coupling("J"));
      append_pair_terms(terms, spec, TermKind::FermPair, spec.coupling("J"));
      double h = spec.coupling_or("h", 0.0);
      if (h != 0.0)
        for (int i = 1; i <= n; ++i)
          terms.push_back({h, TermKind::FermNumHalf, i});
      break;
    }
    case ModelKind::TFIM: {
      double j = spec.coupling("J"), h = spec.coupling("h");
      for (int i = 1; i < n; ++i)
        terms.push_back({-j, TermKind::PairXX, i, i + 1});
      for (int i = 1; i <= n; ++i) terms.push_back({-h, TermKind::SiteZ, i});
      break;
    }
    case ModelKind::KitaevTarget: {
      double t = spec.coupling("t");
      double delta = spec.coupling("delta");
      double mu = spec.coupling("mu");
      for (int i = 1; i < n; ++i) {
        terms.push_back({-t, TermKind::FermHop, i, i + 1});
        terms.push_back({delta, TermKind::FermPair, i, i + 1});
      }
      for (int i = 1; i <= n; ++i)
        terms.push_back({-mu, TermKind::FermNumHalf, i});
      break;
    }
    case ModelKind::BCTarget: {
      double j = spec.coupling("J");
      double d = spec.coupling("aniso_d");
      double h = spec.coupling("h");
      for (int i = 1; i < n; ++i)
        terms.push_back({-j, TermKind::PairSxSx, i, i + 1});
      for (int i = 1; i <= n; ++i) {
        terms.push_back({d, TermKind::SiteSxSq, i});
        terms.push_back({h, TermKind::SiteSz, i});
      }
      break;
    }
    case ModelKind::AAH: {
      double j = spec.coupling("J");
      for (int i = 1; i < n; ++i)
        terms.push_back({-j, TermKind::PairHop, i, i + 1});
      append_aah_field(terms, spec);
      break;
    }
    case ModelKind::AAHResource: {
      append_pair_terms(terms, spec, TermKind::PairHop, -spec.coupling("J"));
      append_aah_field(terms, spec);
      break;
    }
  }
  return terms;
}

TermList resource_interaction_terms(const HamiltonianSpec& spec) {
  require(is_resource(spec.kind), ErrorCode::unsupported_model,
          model_kind_name(spec.kind) + " is not a resource model");
  validate_or_throw(spec);
  TermList terms;
  switch (spec.kind) {
    case ModelKind::XX:
      append_pair_terms(terms, spec, TermKind::PairHop, 1.0);
      break;
    case ModelKind::Ising:
      append_pair_terms(terms, spec, TermKind::PairXhXh, 1.0);
      break;
    case ModelKind::BlumeCapel:
      append_pair_terms(terms, spec, TermKind::PairSxSx, -1.0);
      break;
    case ModelKind::KitaevQuadratic:
      append_pair_terms(terms, spec, TermKind::FermHop, 1.0);
      append_pair_terms(terms, spec, TermKind::FermPair, 1.0);
      break;
    case ModelKind::AAHResource:
      append_pair_terms(terms, spec, TermKind::PairHop, -1.0);
      break;
    default:
      break;
  }
  return terms;
}

TermList resource_driving_terms(const HamiltonianSpec& spec) {
  require(is_resource(spec.kind), ErrorCode::unsupported_model,
          model_kind_name(spec.kind) + " is not a resource model");
  TermList terms;
  const int n = spec.n_sites;
  switch (spec.kind) {
    case ModelKind::XX:
    case ModelKind::Ising:
      for (int i = 1; i <= n; ++i) terms.push_back({1.0, TermKind::SiteZ, i});
      break;
    case ModelKind::BlumeCapel:
      for (int i = 1; i <= n; ++i) terms.push_back({1.0, TermKind::SiteSz, i});
      break;
    case ModelKind::KitaevQuadratic:
      for (int i = 1; i <= n; ++i)
        terms.push_back({1.0, TermKind::FermNumHalf, i});
      break;
    case ModelKind::AAHResource: {
      double alpha = spec.coupling("alpha");
      for (int j = 1; j <= n; ++j)
        terms.push_back(
            {-std::cos(2.0 * kPi * alpha * j), TermKind::SiteZ, j});
      break;
    }
    default:
      break;
  }
  return terms;
}

TermList resource_aniso_terms(const HamiltonianSpec& spec) {
  require(spec.kind == ModelKind::BlumeCapel, ErrorCode::unsupported_model,
          "anisotropy quench only defined for the spin-1 resource");
  TermList terms;
  for (int i = 1; i <= spec.n_sites; ++i)
    terms.push_back({1.0, TermKind::SiteSxSq, i});
  return terms;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].message;
  }
  return os.str();
}

namespace {

struct CouplingRule {
  std::set<std::string> required;
  std::set<std::string> optional;
};

CouplingRule coupling_rule(ModelKind kind) {
  switch (kind) {
    case ModelKind::XX: return {{"J"}, {}};
    case ModelKind::Ising: return {{"J"}, {}};
    case ModelKind::BlumeCapel: return {{"J", "aniso_d"}, {}};
    case ModelKind::KitaevQuadratic: return {{"J"}, {"h"}};
    case ModelKind::TFIM: return {{"J", "h"}, {}};
    case ModelKind::KitaevTarget: return {{"t", "delta", "mu"}, {}};
    case ModelKind::BCTarget: return {{"J", "aniso_d", "h"}, {}};
    case ModelKind::AAH: return {{"J", "h", "alpha"}, {"g"}};
    case ModelKind::AAHResource: return {{"J", "h", "alpha"}, {"g"}};
  }
  return {};
}

}  // namespace

ValidationReport validate(const HamiltonianSpec& spec) {
  ValidationReport report;
  auto add = [&](const std::string& m) { report.issues.push_back({m}); };

  if (spec.n_sites < 2) add("n_sites must be >= 2");

  CouplingRule rule = coupling_rule(spec.kind);
  for (const auto& name : rule.required) {
    if (!spec.couplings.count(name)) add("missing coupling " + name);
  }
  for (const auto& [name, value] : spec.couplings) {
    (void)value;
    if (!rule.required.count(name) && !rule.optional.count(name))
      add("unknown coupling " + name + " for " + model_kind_name(spec.kind));
  }

  if (has_profile(spec.kind)) {
    if (spec.profile.kind != ProfileKind::NearestNeighbor &&
        spec.profile.range <= 0.0)
      add("profile range parameter must be > 0");
  }
  return report;
}

void validate_or_throw(const HamiltonianSpec& spec) {
  ValidationReport report = validate(spec);
  require(report.ok(), ErrorCode::invalid_argument,
          "invalid spec for " + model_kind_name(spec.kind) + ": " +
              report.to_string());
}

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string model_fingerprint(const HamiltonianSpec& spec) {
  std::ostringstream os;
  os << model_kind_name(spec.kind);
  os.precision(17);
  for (const auto& [name, value] : spec.couplings)
    os << "|" << name << "=" << value;
  if (has_profile(spec.kind)) {
    switch (spec.profile.kind) {
      case ProfileKind::Exponential: os << "|exp:L=" << spec.profile.range; break;
      case ProfileKind::PowerLaw: os << "|pl:a=" << spec.profile.range; break;
      case ProfileKind::NearestNeighbor: os << "|nn"; break;
    }
  }
  std::ostringstream hex;
  hex << std::hex << fnv1a(os.str());
  return hex.str();
}

}  // namespace prqc
