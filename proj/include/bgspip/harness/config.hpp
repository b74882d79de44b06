// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_HARNESS_CONFIG_HPP
#define BGSPIP_HARNESS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "../bgs.hpp"
#include "../testmat.hpp"

namespace bgspip::harness
{

//
// Sweep configuration: JSON text of the form
//
//   {
//     "matrix": {"class": "glued", "m": 100, "p": 10, "s": 2,
//                "knob_sweep": [[1, 1.2], [1, 2.2]], "seed": 42},
//     "algorithms": ["BCGS_PIP", "BCGS_PIP+_MP"],
//     "ios": ["HouseQR", "CholQR"],
//     "precision": "double",            (optional, uniform working precision)
//     "mp_pair": ["single", "double"],  (required by *_MP algorithms)
//     "output_dir": "results"           (optional)
//   }
//

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Text is not JSON, or a value has the wrong JSON type.
class ConfigSyntaxError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

class UnknownKeyError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

/// Unregistered algorithm, intraorthogonalization, precision or matrix class.
class UnknownNameError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

class DimensionError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

/// mp_pair whose high precision is coarser than its low precision.
class PrecisionOrderError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

/// Required key absent or a list that must be non-empty is empty.
class MissingValueError : public ConfigError
{
public:
  using ConfigError::ConfigError;
};

struct SweepConfig
{
  MatrixClass matrix_class = MatrixClass::Default;
  index_t m = 0;
  index_t p = 0;
  index_t s = 0;
  std::vector<std::vector<double>> knob_sweep;
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms;
  std::vector<IntraorthId> ios;
  PrecisionId precision = PrecisionId::Double;
  std::optional<PrecisionPair> mp_pair;
  std::string output_dir = "results";

  MatrixSpec spec_at(std::size_t point) const
  {
    return MatrixSpec{matrix_class, m, p, s, knob_sweep.at(point), seed};
  }
};

/// Slack multipliers applied to the O(eps), O(eps)kappa and O(eps)kappa^2
/// bounds, standing in for the unspecified dimension-dependent constants.
struct ToleranceProfile
{
  double eps = 100.0;
  double eps_kappa = 100.0;
  double eps_kappa2 = 100.0;

  void validate() const
  {
    if (!(eps >= 1.0 && eps_kappa >= 1.0 && eps_kappa2 >= 1.0))
      throw std::invalid_argument("ToleranceProfile: every slack multiplier must be >= 1");
  }

  double bound_eps(double u) const { return eps * u; }
  double bound_eps_kappa(double u, double kappa) const { return eps_kappa * u * kappa; }
  double bound_eps_kappa2(double u, double kappa) const { return eps_kappa2 * u * kappa * kappa; }
};

namespace detail
{

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw UnknownKeyError("unknown key '" + key + "' in " + where);
}

inline const json& required(const json& obj, const char* key, const std::string& where)
{
  const auto it = obj.find(key);
  if (it == obj.end())
    throw MissingValueError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

inline index_t read_count(const json& obj, const char* key)
{
  const json& v = required(obj, key, "matrix");
  if (!v.is_number_integer())
    throw ConfigSyntaxError(std::string("matrix.") + key + " must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 1)
    throw DimensionError(std::string("matrix.") + key + " must be positive");
  return static_cast<index_t>(n);
}

inline PrecisionId read_precision(const json& v, const std::string& where)
{
  if (!v.is_string())
    throw ConfigSyntaxError(where + " must be a precision name");
  const auto id = parse_precision(v.get<std::string>());
  if (!id)
    throw UnknownNameError("unknown precision '" + v.get<std::string>() + "' in " + where);
  return *id;
}

template <typename Id, typename Parse>
std::vector<Id> read_names(const json& obj, const char* key, Parse parse, const char* kind)
{
  const json& v = required(obj, key, "config");
  if (!v.is_array())
    throw ConfigSyntaxError(std::string(key) + " must be an array of names");
  if (v.empty())
    throw MissingValueError(std::string(key) + " must not be empty");
  std::vector<Id> out;
  for (const json& e : v)
  {
    if (!e.is_string())
      throw ConfigSyntaxError(std::string(key) + " entries must be strings");
    const auto id = parse(e.get<std::string>());
    if (!id)
      throw UnknownNameError(std::string("unknown ") + kind + " '" + e.get<std::string>() + "'");
    out.push_back(*id);
  }
  return out;
}

} // namespace detail

/// Parses and validates a sweep configuration. Each failure mode raises its
/// own ConfigError subclass.
inline SweepConfig parse_config(const std::string& text)
{
  using detail::json;
  json root;
  try
  {
    root = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    throw ConfigSyntaxError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigSyntaxError("config must be a JSON object");
  detail::reject_unknown_keys(root, {"matrix", "algorithms", "ios", "precision", "mp_pair", "output_dir"}, "config");

  SweepConfig cfg;
  const json& mat = detail::required(root, "matrix", "config");
  if (!mat.is_object())
    throw ConfigSyntaxError("matrix must be an object");
  detail::reject_unknown_keys(mat, {"class", "m", "p", "s", "knob_sweep", "seed"}, "matrix");

  const json& cls = detail::required(mat, "class", "matrix");
  if (!cls.is_string())
    throw ConfigSyntaxError("matrix.class must be a string");
  const auto mc = parse_matrix_class(cls.get<std::string>());
  if (!mc)
    throw UnknownNameError("unknown matrix class '" + cls.get<std::string>() + "'");
  cfg.matrix_class = *mc;

  cfg.m = detail::read_count(mat, "m");
  cfg.p = detail::read_count(mat, "p");
  cfg.s = detail::read_count(mat, "s");
  if (cfg.p * cfg.s > cfg.m)
    throw DimensionError("matrix: p*s must not exceed m");

  if (const auto it = mat.find("seed"); it != mat.end())
  {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
      throw ConfigSyntaxError("matrix.seed must be a nonnegative integer");
    cfg.seed = it->get<std::uint64_t>();
  }

  const json& sweep = detail::required(mat, "knob_sweep", "matrix");
  if (!sweep.is_array())
    throw ConfigSyntaxError("matrix.knob_sweep must be an array");
  if (sweep.empty())
    throw MissingValueError("matrix.knob_sweep must not be empty");
  for (const json& point : sweep)
  {
    std::vector<double> knobs;
    if (point.is_number())
      knobs.push_back(point.get<double>());
    else if (point.is_array())
    {
      for (const json& k : point)
      {
        if (!k.is_number())
          throw ConfigSyntaxError("knob values must be numbers");
        knobs.push_back(k.get<double>());
      }
    }
    else
      throw ConfigSyntaxError("knob_sweep entries must be numbers or arrays of numbers");
    if (knobs.size() != knob_count(cfg.matrix_class))
      throw DimensionError("knob_sweep entry has " + std::to_string(knobs.size()) + " knobs; class '" +
                           std::string(to_string(cfg.matrix_class)) + "' takes " +
                           std::to_string(knob_count(cfg.matrix_class)));
    cfg.knob_sweep.push_back(std::move(knobs));
  }
  for (std::size_t i = 0; i < cfg.knob_sweep.size(); ++i)
  {
    try
    {
      validate(cfg.spec_at(i));
    }
    catch (const contract_error& e)
    {
      throw DimensionError(std::string("knob_sweep entry ") + std::to_string(i) + ": " + e.what());
    }
  }

  cfg.algorithms = detail::read_names<Algorithm>(root, "algorithms", parse_algorithm, "algorithm");
  cfg.ios = detail::read_names<IntraorthId>(root, "ios", parse_intraorth, "intraorthogonalization");

  if (const auto it = root.find("precision"); it != root.end())
    cfg.precision = detail::read_precision(*it, "precision");

  if (const auto it = root.find("mp_pair"); it != root.end())
  {
    if (!it->is_array() || it->size() != 2)
      throw ConfigSyntaxError("mp_pair must be an array of two precision names");
    const PrecisionId low = detail::read_precision((*it)[0], "mp_pair[0]");
    const PrecisionId high = detail::read_precision((*it)[1], "mp_pair[1]");
    if (unit_roundoff(high) > unit_roundoff(low))
      throw PrecisionOrderError("mp_pair: high precision '" + std::string(to_string(high)) +
                                "' is coarser than low precision '" + std::string(to_string(low)) + "'");
    cfg.mp_pair = PrecisionPair(low, high);
  }
  for (Algorithm a : cfg.algorithms)
    if (is_mixed_precision(a) && !cfg.mp_pair)
      throw MissingValueError("algorithm " + std::string(to_string(a)) + " requires mp_pair");

  if (const auto it = root.find("output_dir"); it != root.end())
  {
    if (!it->is_string())
      throw ConfigSyntaxError("output_dir must be a string");
    cfg.output_dir = it->get<std::string>();
  }
  return cfg;
}

/// Canonical JSON form; parse_config(to_json(c).dump()) reproduces c.
inline nlohmann::json to_json(const SweepConfig& cfg)
{
  using detail::json;
  json mat = {{"class", std::string(to_string(cfg.matrix_class))},
              {"m", cfg.m},
              {"p", cfg.p},
              {"s", cfg.s},
              {"knob_sweep", cfg.knob_sweep},
              {"seed", cfg.seed}};
  json algs = json::array();
  for (Algorithm a : cfg.algorithms)
    algs.push_back(std::string(to_string(a)));
  json ios = json::array();
  for (IntraorthId io : cfg.ios)
    ios.push_back(std::string(to_string(io)));
  json root = {{"matrix", mat},
               {"algorithms", algs},
               {"ios", ios},
               {"precision", std::string(to_string(cfg.precision))},
               {"output_dir", cfg.output_dir}};
  if (cfg.mp_pair)
    root["mp_pair"] = {std::string(to_string(cfg.mp_pair->low())), std::string(to_string(cfg.mp_pair->high()))};
  return root;
}

} // namespace bgspip::harness

#endif
