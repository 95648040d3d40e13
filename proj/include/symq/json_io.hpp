#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "symq/canonical.hpp"
#include "symq/sym_space.hpp"
#include "symq/wedge_space.hpp"

namespace symq {

namespace detail {

inline nlohmann::json complex_to_json(cd z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline cd complex_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(field + ": expected a [re, im] pair");
  cd z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument(field + ": non-finite entry");
  return z;
}

inline nlohmann::json amplitudes_to_json(const Vec& amp) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < amp.size(); ++i) arr.push_back(complex_to_json(amp(i)));
  return arr;
}

inline Vec amplitudes_from_json(const nlohmann::json& j, std::int64_t expected) {
  if (!j.is_array()) throw std::invalid_argument("amplitudes: expected an array");
  if (static_cast<std::int64_t>(j.size()) != expected)
    throw std::invalid_argument("amplitudes: got " + std::to_string(j.size()) +
                                " entries, expected " + std::to_string(expected));
  Vec amp(expected);
  for (std::int64_t i = 0; i < expected; ++i)
    amp(i) = complex_from_json(j[i], "amplitudes[" + std::to_string(i) + "]");
  return amp;
}

inline void require_field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw std::invalid_argument(std::string(name) + ": missing field");
}

inline std::pair<HalfInt, int> shape_from_json(const nlohmann::json& j) {
  require_field(j, "spin2");
  require_field(j, "parties");
  if (!j["spin2"].is_number_integer() || j["spin2"].get<int>() < 0)
    throw std::invalid_argument("spin2: expected a nonnegative integer");
  if (!j["parties"].is_number_integer() || j["parties"].get<int>() < 1)
    throw std::invalid_argument("parties: expected a positive integer");
  return {HalfInt::from_twice(j["spin2"].get<int>()), j["parties"].get<int>()};
}

inline nlohmann::json stars_to_json(const Constellation& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Vec3& n : c.stars) arr.push_back({n.x(), n.y(), n.z()});
  return arr;
}

inline Constellation stars_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw std::invalid_argument(field + ": expected an array of points");
  Constellation c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const nlohmann::json& p = j[i];
    if (!p.is_array() || p.size() != 3)
      throw std::invalid_argument(field + "[" + std::to_string(i) + "]: expected [x, y, z]");
    c.stars.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return c;
}

}  // namespace detail

inline nlohmann::json state_to_json(const SymState& state) {
  return {{"space", "sym"},
          {"spin2", state.s.twice()},
          {"parties", state.k},
          {"basis", basis_name(state.basis)},
          {"amplitudes", detail::amplitudes_to_json(state.amp)}};
}

inline nlohmann::json state_to_json(const WedgeState& state) {
  return {{"space", "wedge"},
          {"spin2", state.s.twice()},
          {"parties", state.k},
          {"basis", basis_name(state.basis)},
          {"amplitudes", detail::amplitudes_to_json(state.amp)}};
}

inline bool json_is_wedge(const nlohmann::json& j) {
  return j.contains("space") && j["space"].is_string() &&
         j["space"].get<std::string>() == "wedge";
}

inline SymState state_from_json(const nlohmann::json& j) {
  if (json_is_wedge(j))
    throw std::invalid_argument("space: expected a symmetric state, got a wedge state");
  auto [s, k] = detail::shape_from_json(j);
  detail::require_field(j, "basis");
  detail::require_field(j, "amplitudes");
  Basis basis = basis_from_name(j["basis"].get<std::string>());
  SymState out{s, k, basis, Vec()};
  out.amp = detail::amplitudes_from_json(j["amplitudes"], out.dim());
  return out;
}

inline WedgeState wedge_from_json(const nlohmann::json& j) {
  if (!json_is_wedge(j))
    throw std::invalid_argument("space: expected a wedge state");
  auto [s, k] = detail::shape_from_json(j);
  detail::require_field(j, "basis");
  detail::require_field(j, "amplitudes");
  Basis basis = basis_from_name(j["basis"].get<std::string>());
  if (basis == Basis::induced)
    throw std::invalid_argument("basis: wedge states have no induced basis");
  WedgeState out{s, k, basis, Vec()};
  if (k > s.multiplet_dim())
    throw std::invalid_argument("parties: more factors than the single-party dimension");
  out.amp = detail::amplitudes_from_json(j["amplitudes"], out.dim());
  return out;
}

inline nlohmann::json multiconstellation_to_json(const Multiconstellation& mc) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const BlockConstellation& b : mc.blocks) {
    blocks.push_back({{"j2", b.twice_j},
                      {"alpha", b.alpha},
                      {"zero", b.zero},
                      {"symmetric", b.symmetric},
                      {"anticoherent_fallback", b.anticoherent_fallback},
                      {"z", detail::complex_to_json(b.z)},
                      {"stars", detail::stars_to_json(b.stars)}});
  }
  return {{"spin2", mc.s.twice()},
          {"parties", mc.k},
          {"blocks", blocks},
          {"spectator", detail::stars_to_json(mc.spectator)}};
}

inline Multiconstellation multiconstellation_from_json(const nlohmann::json& j) {
  auto [s, k] = detail::shape_from_json(j);
  detail::require_field(j, "blocks");
  Multiconstellation mc;
  mc.s = s;
  mc.k = k;
  if (!j["blocks"].is_array()) throw std::invalid_argument("blocks: expected an array");
  for (std::size_t i = 0; i < j["blocks"].size(); ++i) {
    const nlohmann::json& jb = j["blocks"][i];
    std::string field = "blocks[" + std::to_string(i) + "]";
    BlockConstellation b;
    detail::require_field(jb, "j2");
    b.twice_j = jb["j2"].get<int>();
    b.alpha = jb.value("alpha", 1);
    b.zero = jb.value("zero", false);
    b.symmetric = jb.value("symmetric", false);
    b.anticoherent_fallback = jb.value("anticoherent_fallback", false);
    if (jb.contains("z")) b.z = detail::complex_from_json(jb["z"], field + ".z");
    if (jb.contains("stars")) b.stars = detail::stars_from_json(jb["stars"], field + ".stars");
    mc.blocks.push_back(std::move(b));
  }
  if (j.contains("spectator"))
    mc.spectator = detail::stars_from_json(j["spectator"], "spectator");
  return mc;
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

inline void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace symq
