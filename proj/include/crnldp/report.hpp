#pragma once

// JSON reports. Exact rationals are emitted as "p/q" strings next to their
// float approximations; key order is fixed so output is byte-deterministic.

#include "crnldp/geometry.hpp"
#include "crnldp/io.hpp"
#include "crnldp/ldp.hpp"
#include "crnldp/model.hpp"
#include "crnldp/quasipotential.hpp"
#include "crnldp/topology.hpp"

#include "json.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace crnldp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Non-finite values become the strings "inf", "-inf" or "nan".
inline Json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline Json json_numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(json_number(x));
  return out;
}

inline Json json_rational_vector(const RationalVector& v) {
  Json exact = Json::array(), approx = Json::array();
  for (const auto& q : v) {
    exact.push_back(to_string(q));
    approx.push_back(to_double(q));
  }
  return Json{{"exact", exact}, {"float", approx}};
}

inline Json json_species_set(const Network& net, const SupportSet& P) {
  Json out = Json::array();
  for (auto i : P.indices()) out.push_back(net.species()[i]);
  return out;
}

inline Json json_network(const Network& net) {
  Json reactions = Json::array();
  for (const auto& r : net.reactions()) reactions.push_back(format_reaction(net, r));
  return Json{{"species", net.species()}, {"reactions", reactions}};
}

inline Json json_violation(const Network& net, const Violation& v) {
  Json j;
  j["kind"] = v.kind == Violation::Kind::Explosive ? "explosive" : "no-dissipative";
  j["face"] = v.face;
  j["direction"] = json_rational_vector(v.direction);
  if (v.reaction) {
    j["reaction"] = *v.reaction;
    j["reaction_text"] = format_reaction(net, net.reaction(*v.reaction));
  } else {
    j["reaction"] = nullptr;
    j["reaction_text"] = nullptr;
  }
  j["class"] = to_string(v.cls);
  return j;
}

inline Json json_face_lattice(const Network& net, const FaceLattice& lat) {
  Json pts = Json::array();
  for (const auto& p : lat.polytope.points) pts.push_back(json_rational_vector(p).at("exact"));
  Json normals = Json::array();
  for (const auto& n : lat.facet_normals) normals.push_back(json_rational_vector(n).at("exact"));
  Json faces = Json::array();
  for (const auto& f : lat.faces) {
    faces.push_back(Json{{"dim", f.dim},
                         {"points", f.point_indices},
                         {"facets", f.facets},
                         {"improper", f.improper}});
  }
  return Json{{"support", json_species_set(net, lat.polytope.support)},
              {"affine_dim", lat.polytope.affine_dim},
              {"points", pts},
              {"facet_normals", normals},
              {"faces", faces}};
}

inline Json json_ledger(const ConstantLedger& L) {
  Json C = Json::array();
  for (std::size_t j = 0; j < L.log_C.size(); ++j) C.push_back(json_number(std::exp(L.log_C[j])));
  Json j;
  j["c_star"] = json_number(L.c_star);
  j["kappa"] = json_numbers(L.kappa);
  j["K1"] = json_number(L.K1);
  j["K2"] = json_number(L.K2);
  j["K3"] = json_number(L.K3);
  j["zeta_star"] = json_number(L.zeta_star);
  j["K5"] = json_number(L.K5);
  j["K0"] = json_number(L.K0);
  j["log_C"] = json_numbers(L.log_C);
  j["C"] = C;
  j["rho0"] = L.rho0 ? json_number(*L.rho0) : Json(nullptr);
  j["zeta_empirical"] = L.zeta_empirical ? json_number(*L.zeta_empirical) : Json(nullptr);
  j["configured"] = L.configured;
  return j;
}

struct AnalyzeOptions {
  std::optional<WeightVector> a;
  ConstantOverrides overrides;
  std::size_t empirical_samples = 200;  // 0 skips the empirical rho0 and zeta* searches
  std::uint64_t seed = 1;
  SearchOptions search;
};

struct Analysis {
  AseReport ase;
  ConstantLedger ledger;
  std::optional<FaceLattice> lattice;  // of the full support
};

inline Analysis analyze(const Network& net, const AnalyzeOptions& opt = {}) {
  Analysis out;
  out.ase = ase_report(net, opt.a, opt.search);
  const WeightVector a = out.ase.a ? *out.ase.a : (opt.a ? *opt.a : WeightVector::ones(net.dimension()));
  out.ledger = proof_constants(net, a, opt.overrides);
  if (opt.empirical_samples > 0) {
    const auto ad = a.as_double();
    out.ledger.zeta_empirical = empirical_zeta_star(net, ad, opt.empirical_samples, opt.seed);
    if (out.ase.ase)
      if (auto scan = empirical_rho0(net, ad, opt.empirical_samples, opt.seed)) out.ledger.rho0 = scan->rho0;
  }
  try {
    out.lattice = face_lattice(net, SupportSet::full(net.dimension()));
  } catch (const EmptyReactionSet&) {
  }
  return out;
}

inline Json analysis_json(const Network& net, const Analysis& an) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["network_hash"] = network_hash(net);
  j["network"] = json_network(net);
  Json siphons = Json::array();
  for (const auto& P : an.ase.siphons.minimal_siphons) siphons.push_back(json_species_set(net, P));
  j["siphons"] = Json{{"asiphonic", an.ase.siphons.asiphonic}, {"minimal", siphons}};
  Json endo;
  const auto& v = an.ase.verdict;
  endo["holds"] = v.holds;
  endo["a"] = an.ase.a ? json_rational_vector(an.ase.a->values()) : Json(nullptr);
  endo["support"] = json_species_set(net, v.support);
  endo["degenerate_hull"] = v.degenerate_hull;
  Json viol = Json::array();
  for (const auto& x : v.violations) viol.push_back(json_violation(net, x));
  endo["violations"] = viol;
  j["endotactic"] = endo;
  j["ase"] = an.ase.ase;
  j["restriction_consistent"] = an.ase.restriction_consistent;
  j["positive_span"] = an.ase.positive_span;
  j["constants_ledger"] = json_ledger(an.ledger);
  j["polytope"] = an.lattice ? json_face_lattice(net, *an.lattice) : Json(nullptr);
  return j;
}

inline Json trajectory_json(const Trajectory& tr) {
  Json out = Json::array();
  for (std::size_t k = 0; k < tr.size(); ++k) out.push_back(Json{{"t", tr.times[k]}, {"x", tr.states[k]}});
  return out;
}

inline Json quasipotential_json(const QuasipotentialEstimate& est) {
  Json runs = Json::array();
  for (const auto& r : est.runs)
    runs.push_back(Json{{"T_start", r.T_start},
                        {"restart", r.restart},
                        {"initial_value", json_number(r.initial_value)},
                        {"value", json_number(r.value)},
                        {"iterations", r.iterations},
                        {"converged", r.converged}});
  return Json{{"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"value", json_number(est.value)},
              {"T_star", est.T_star},
              {"initial_value", json_number(est.initial_value)},
              {"no_descent", est.no_descent},
              {"boundary_grazing", est.boundary_grazing},
              {"runs", runs},
              {"path", trajectory_json(est.path)}};
}

}  // namespace crnldp
