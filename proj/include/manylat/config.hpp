#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "manylat/basis.hpp"
#include "manylat/disorder.hpp"
#include "manylat/errors.hpp"
#include "manylat/interactions.hpp"
#include "manylat/lattice.hpp"

namespace manylat {

using json = nlohmann::json;

// Rejects keys outside the declared set so typos never pass silently.
inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_req(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
  }
}

inline DisorderSpec parse_disorder(const json& obj) {
  check_keys(obj, "disorder", {"kind", "a", "b", "p", "v0", "v1", "c"});
  std::string kind = get_req<std::string>(obj, "disorder", "kind");
  if (kind == "uniform")
    return DisorderSpec::uniform(get_req<double>(obj, "disorder", "a"),
                                 get_req<double>(obj, "disorder", "b"));
  if (kind == "bernoulli")
    return DisorderSpec::bernoulli(get_req<double>(obj, "disorder", "p"),
                                   get_or<double>(obj, "disorder", "v0", 0.0),
                                   get_req<double>(obj, "disorder", "v1"));
  if (kind == "constant")
    return DisorderSpec::constant(get_req<double>(obj, "disorder", "c"));
  throw ConfigError("disorder kind must be uniform, bernoulli, or constant");
}

inline InteractionSpec parse_interaction(const json& obj) {
  check_keys(obj, "interaction",
             {"kind", "A", "lambda", "R0", "near_field", "Q", "screen", "pti_lambda",
              "values_by_sqdist", "declared_B", "r0", "tail"});
  std::string kind = get_req<std::string>(obj, "interaction", "kind");
  if (kind == "none") return InteractionSpec::none_interaction();
  if (kind == "tempered")
    return InteractionSpec::tempered_power(get_req<double>(obj, "interaction", "A"),
                                           get_req<double>(obj, "interaction", "lambda"),
                                           get_req<double>(obj, "interaction", "R0"),
                                           get_or<double>(obj, "interaction", "near_field", -1.0));
  if (kind == "yukawa")
    return InteractionSpec::yukawa(get_req<double>(obj, "interaction", "Q"),
                                   get_req<double>(obj, "interaction", "screen"),
                                   get_or<double>(obj, "interaction", "pti_lambda", -1.0));
  if (kind == "compact")
    return InteractionSpec::compact(
        get_req<std::vector<double>>(obj, "interaction", "values_by_sqdist"),
        get_or<double>(obj, "interaction", "declared_B", 0.0),
        get_or<double>(obj, "interaction", "pti_lambda", 2.0));
  if (kind == "hardcore") {
    double r0 = get_req<double>(obj, "interaction", "r0");
    if (obj.contains("tail"))
      return InteractionSpec::hardcore(
          r0, std::make_shared<InteractionSpec>(parse_interaction(obj.at("tail"))));
    return InteractionSpec::hardcore(r0);
  }
  throw ConfigError("interaction kind must be none, tempered, yukawa, compact, or hardcore");
}

inline Statistics parse_statistics(const json& cfg, const std::string& where) {
  std::string s = get_req<std::string>(cfg, where, "statistics");
  try {
    return statistics_from_string(s);
  } catch (const ConfigError&) {
    throw ConfigError("statistics must be boltzmann, bose, or fermi");
  }
}

inline CubeSequenceParams parse_cube(const json& obj) {
  check_keys(obj, "cube", {"d", "theta", "Ltilde", "R0", "delta", "lambda"});
  CubeSequenceParams p;
  p.d = int(get_req<long>(obj, "cube", "d"));
  p.theta = get_req<double>(obj, "cube", "theta");
  p.Ltilde = get_req<long>(obj, "cube", "Ltilde");
  p.R0 = get_req<double>(obj, "cube", "R0");
  p.delta = get_or<double>(obj, "cube", "delta", 4.0);
  p.lambda = get_req<double>(obj, "cube", "lambda");
  p.validate();
  return p;
}

// A box with side sites per axis, corner at the origin.
inline Box origin_box(int d, long side) {
  return Box(d, IVec(size_t(d), 0), IVec(size_t(d), side));
}

// Two boxes separated by the given Euclidean gap along the first axis.
inline std::pair<Box, Box> gap_pair(int d, long side1, long side2, long gap) {
  Box b1 = origin_box(d, side1);
  IVec corner2(size_t(d), 0);
  corner2[0] = side1 - 1 + gap;
  Box b2(d, corner2, IVec(size_t(d), side2));
  return {b1, b2};
}

struct RunConfig {
  json raw;  // full effective config, embedded in every summary for replay
  std::string experiment;
  std::string label = "run";
  std::uint64_t seed = 1;
  long realizations = 1;
  int threads = 1;
  std::string out = "out";
};

inline const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names = {
      "spectrum",     "ids",         "boltzmann-limit", "fermion-density", "weyl-check",
      "wegner-check", "subadd-check", "testfn-check",    "cube-seq",        "hardcore-packing"};
  return names;
}

// Keys every experiment accepts; experiment-specific keys are checked by the
// drivers on top of this set.
inline const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys = {"experiment", "label", "seed", "realizations",
                                             "threads",    "out"};
  return keys;
}

inline RunConfig parse_run_config(const json& cfg, const std::set<std::string>& extra_keys) {
  std::set<std::string> allowed = common_keys();
  allowed.insert(extra_keys.begin(), extra_keys.end());
  check_keys(cfg, "config", allowed);
  RunConfig rc;
  rc.raw = cfg;
  rc.experiment = get_req<std::string>(cfg, "config", "experiment");
  if (!experiment_names().count(rc.experiment))
    throw ConfigError("unknown experiment '" + rc.experiment + "'");
  rc.label = get_or<std::string>(cfg, "config", "label", "run");
  if (rc.label.empty() || rc.label.find('/') != std::string::npos)
    throw ConfigError("label must be a nonempty path segment");
  rc.seed = get_or<std::uint64_t>(cfg, "config", "seed", 1);
  rc.realizations = get_or<long>(cfg, "config", "realizations", 1);
  if (rc.realizations < 1) throw ConfigError("realizations must be >= 1");
  rc.threads = int(get_or<long>(cfg, "config", "threads", 1));
  if (rc.threads < 1) throw ConfigError("threads must be >= 1");
  rc.out = get_or<std::string>(cfg, "config", "out", "out");
  if (rc.out.empty()) throw ConfigError("out must be a nonempty path");
  return rc;
}

// Stable 64-bit FNV-1a over the canonical (sorted-key) config dump, so every
// artifact can be traced back to the exact configuration that produced it.
inline std::string config_hash(const json& cfg) {
  std::string s = cfg.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

}  // namespace manylat
