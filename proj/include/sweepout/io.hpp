#pragma once

// Artifact file formats. Exact values are always written as integers or
// "p/q" strings so that every file reads back to identical in-memory values.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sweepout/errors.hpp"
#include "sweepout/grid.hpp"
#include "sweepout/random.hpp"
#include "sweepout/rational.hpp"
#include "sweepout/rotation_solver.hpp"
#include "sweepout/sequences.hpp"

namespace sweepout::io {

using json = nlohmann::json;

namespace detail {

inline std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  auto end = s.find_last_not_of(ws);
  s.erase(end == std::string::npos ? 0 : end + 1);
  return s;
}

// Parses "# key=value" header lines; returns false for other lines.
inline bool header_entry(const std::string& line, std::map<std::string, std::string>& into) {
  if (line.empty() || line[0] != '#') return false;
  std::string body = trim(line.substr(1));
  auto eq = body.find('=');
  if (eq == std::string::npos) return true;
  into[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  return true;
}

inline const std::string& require(const std::map<std::string, std::string>& h, const std::string& key) {
  auto it = h.find(key);
  if (it == h.end()) throw parse_error("missing header field '" + key + "'");
  return it->second;
}

inline std::uint64_t to_u64(const std::string& s) {
  Integer v = parse_integer(s);
  if (v < 0 || !v.fits_ulong_p()) throw parse_error("value '" + s + "' is not a 64-bit unsigned integer");
  return v.get_ui();
}

}  // namespace detail

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw invalid_argument("cannot open '" + path + "' for writing");
  return out;
}

// Sequence file: "# start_index=<n0>" then one decimal integer per line.

inline void write_sequence(std::ostream& out, const IntegerSequence& seq) {
  out << "# start_index=" << seq.start_index() << "\n";
  for (const auto& t : seq.terms()) out << t.get_str() << "\n";
}

inline IntegerSequence read_sequence(std::istream& in) {
  std::map<std::string, std::string> header;
  std::vector<Integer> terms;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || detail::header_entry(line, header)) continue;
    terms.push_back(parse_integer(line));
  }
  const std::uint64_t start = header.count("start_index") ? detail::to_u64(header["start_index"]) : 1;
  return IntegerSequence(start, std::move(terms));
}

// Constraint file for the rotation solver: one "a target" pair per line.

inline std::vector<BinConstraint> read_constraints(std::istream& in) {
  std::vector<BinConstraint> out;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string a, p;
    if (!(fields >> a >> p)) throw parse_error("constraint line '" + line + "' needs 'a target'");
    out.push_back({parse_integer(a), detail::to_u64(p)});
  }
  return out;
}

// Draw file: header {seed, profile, eta | p, n_start, t_max} + one index per line.

inline void write_draw(std::ostream& out, const RandomDraw& draw) {
  out << "# seed=" << draw.seed << "\n";
  if (draw.profile.kind == ProbabilityProfile::Kind::log_log_log) {
    out << "# profile=log_log_log\n# eta=" << to_fraction_string(draw.profile.eta) << "\n";
  } else {
    out << "# profile=constant\n# p=" << to_fraction_string(draw.profile.constant_p) << "\n";
  }
  out << "# n_start=" << draw.profile.n_start << "\n# t_max=" << draw.t_max << "\n";
  for (auto n : draw.selected) out << n << "\n";
}

inline RandomDraw read_draw(std::istream& in) {
  std::map<std::string, std::string> header;
  RandomDraw draw;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || detail::header_entry(line, header)) continue;
    draw.selected.push_back(detail::to_u64(line));
  }
  draw.seed = detail::to_u64(detail::require(header, "seed"));
  draw.t_max = detail::to_u64(detail::require(header, "t_max"));
  const std::uint64_t n_start = detail::to_u64(detail::require(header, "n_start"));
  const std::string kind = header.count("profile") ? header["profile"] : "log_log_log";
  if (kind == "log_log_log") {
    draw.profile = ProbabilityProfile::log_log_log(parse_rational(detail::require(header, "eta")), n_start);
  } else if (kind == "constant") {
    draw.profile = ProbabilityProfile::constant(parse_rational(detail::require(header, "p")), n_start);
  } else {
    throw parse_error("unknown profile '" + kind + "'");
  }
  for (std::size_t i = 0; i < draw.selected.size(); ++i) {
    if (draw.selected[i] < n_start || draw.selected[i] > draw.t_max || (i > 0 && draw.selected[i] <= draw.selected[i - 1])) {
      throw parse_error("draw indices must be strictly increasing within [n_start, t_max]");
    }
  }
  return draw;
}

// Thinning file: header, then sections [B] [D] [E] [pending] [uncovered]
// [flagged] with one index per line, and [occupancy] with "m count" lines.

inline void write_thinning(std::ostream& out, const ThinningResult& r, const Rational& eta, std::uint64_t t_max) {
  out << "# eta=" << to_fraction_string(eta) << "\n# t_max=" << t_max << "\n";
  auto section = [&](const char* name, const std::vector<std::uint64_t>& v) {
    out << "[" << name << "]\n";
    for (auto x : v) out << x << "\n";
  };
  section("B", r.B);
  section("D", r.D);
  section("E", r.E);
  section("pending", r.pending);
  section("uncovered", r.uncovered);
  section("flagged", r.flagged_intervals);
  out << "[occupancy]\n";
  for (const auto& [m, c] : r.occupancy) out << m << " " << c << "\n";
}

struct ThinningFile {
  Rational eta;
  std::uint64_t t_max = 0;
  ThinningResult result;
};

inline ThinningFile read_thinning(std::istream& in) {
  ThinningFile f;
  std::map<std::string, std::string> header;
  std::string section;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || detail::header_entry(line, header)) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto& r = f.result;
    if (section == "occupancy") {
      std::istringstream fields(line);
      std::string m, c;
      if (!(fields >> m >> c)) throw parse_error("occupancy line '" + line + "' needs 'm count'");
      r.occupancy[detail::to_u64(m)] = detail::to_u64(c);
      continue;
    }
    const std::uint64_t v = detail::to_u64(line);
    if (section == "B") r.B.push_back(v);
    else if (section == "D") r.D.push_back(v);
    else if (section == "E") r.E.push_back(v);
    else if (section == "pending") r.pending.push_back(v);
    else if (section == "uncovered") r.uncovered.push_back(v);
    else if (section == "flagged") r.flagged_intervals.push_back(v);
    else throw parse_error("value outside a known section: '" + line + "'");
  }
  f.eta = parse_rational(detail::require(header, "eta"));
  f.t_max = detail::to_u64(detail::require(header, "t_max"));
  return f;
}

// Density CSV: t, A_t, B_t, ratio_num, ratio_den (ratio fields empty when A_t = 0).

inline void write_density_csv(std::ostream& out, const std::vector<DensityRow>& rows) {
  out << "t,A_t,B_t,ratio_num,ratio_den\n";
  for (const auto& r : rows) {
    out << r.t << "," << r.a_count << "," << r.b_count << ",";
    if (r.ratio) out << r.ratio->get_num().get_str() << "," << r.ratio->get_den().get_str();
    else out << ",";
    out << "\n";
  }
}

// Grid artifact (JSON).

struct GridArtifact {
  GridParameters params;
  std::vector<IndexBlock> blocks;
  std::uint64_t n_total = 0;
  RotationVector rotation;
  std::string sequence_file;
};

inline json to_json(const GridParameters& p) {
  return json{{"eta", to_fraction_string(p.eta)},
              {"epsilon", to_fraction_string(p.epsilon)},
              {"C", to_fraction_string(p.C)},
              {"Q", p.Q},
              {"K", p.K},
              {"mode", to_string(p.mode)},
              {"block_length", p.block_length},
              {"N1", p.N1},
              {"N_symbolic", p.horizon_symbolic()}};
}

inline GridParameters parameters_from_json(const json& j) {
  GridParameters p;
  p.eta = parse_rational(j.at("eta").get<std::string>());
  p.epsilon = parse_rational(j.at("epsilon").get<std::string>());
  p.C = parse_rational(j.at("C").get<std::string>());
  p.Q = j.at("Q").get<std::uint64_t>();
  p.K = j.at("K").get<std::uint64_t>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "demo" && mode != "full") throw parse_error("unknown grid mode '" + mode + "'");
  p.mode = mode == "demo" ? GridMode::demo : GridMode::full;
  p.block_length = j.value("block_length", std::uint64_t{0});
  p.N1 = j.value("N1", std::uint64_t{0});
  return p;
}

inline json rotation_to_json(const RotationVector& r) {
  json arr = json::array();
  for (const auto& c : r.coords()) arr.push_back(to_fraction_string(c.value()));
  return arr;
}

inline RotationVector rotation_from_json(const json& arr) {
  std::vector<UnitRational> coords;
  for (const auto& v : arr) {
    const Rational x = parse_rational(v.get<std::string>());
    if (x < 0 || x >= 1) throw parse_error("rotation coordinate " + v.get<std::string>() + " is not in [0, 1)");
    coords.emplace_back(x);
  }
  return RotationVector(std::move(coords));
}

inline json to_json(const GridArtifact& g) {
  json blocks = json::array();
  for (const auto& b : g.blocks) blocks.push_back({b.lo, b.hi});
  json j = to_json(g.params);
  j["blocks"] = std::move(blocks);
  j["N_total"] = g.n_total;
  j["rotation"] = rotation_to_json(g.rotation);
  j["sequence_file"] = g.sequence_file;
  j["enumeration"] = "mixed-radix-le";
  return j;
}

inline GridArtifact grid_from_json(const json& j) {
  try {
    GridArtifact g;
    g.params = parameters_from_json(j);
    if (j.value("enumeration", std::string("mixed-radix-le")) != "mixed-radix-le") {
      throw parse_error("unsupported cube enumeration '" + j.at("enumeration").get<std::string>() + "'");
    }
    for (const auto& b : j.at("blocks")) g.blocks.push_back({b.at(0).get<std::uint64_t>(), b.at(1).get<std::uint64_t>()});
    g.n_total = j.value("N_total", std::uint64_t{0});
    g.rotation = rotation_from_json(j.at("rotation"));
    g.sequence_file = j.value("sequence_file", std::string());
    return g;
  } catch (const json::exception& e) {
    throw parse_error(std::string("malformed grid artifact: ") + e.what());
  }
}

inline json to_json(const SweepoutReport& rep) {
  json cubes = json::array();
  for (const auto& c : rep.cubes) {
    json w = nullptr;
    if (c.witness) {
      w = json{{"k", c.witness->coordinate},
               {"n", c.witness->n},
               {"expected_bin", c.witness->expected_bin},
               {"found_bin", c.witness->found_bin ? json(*c.witness->found_bin) : json("on_boundary")}};
    }
    json samples = json::array();
    for (std::size_t s = 0; s < c.sample_points.size(); ++s) {
      samples.push_back({{"x", rotation_to_json(c.sample_points[s])},
                         {"average", to_fraction_string(c.sample_averages[s])}});
    }
    cubes.push_back({{"cube_index", c.cube_index},
                     {"q_vector", c.q},
                     {"block", {c.block.lo, c.block.hi}},
                     {"certificate", c.certificate_pass},
                     {"samples", std::move(samples)},
                     {"pass", c.pass},
                     {"witness", std::move(w)}});
  }
  return json{{"parameters", to_json(rep.params)},
              {"bad_set_measure", to_fraction_string(rep.bad_set_measure)},
              {"bad_set_measure_approx", approx_decimal(rep.bad_set_measure)},
              {"measure_budget", to_fraction_string(rep.params.measure_budget())},
              {"measure_within_budget", rep.measure_within_budget},
              {"cubes_passed", rep.cubes_passed},
              {"cube_count", rep.cubes.size()},
              {"full_cover", rep.full_cover},
              {"cubes", std::move(cubes)}};
}

/// One row per cube: extremes of the sampled block averages, for plotting.
inline void write_cube_csv(std::ostream& out, const SweepoutReport& rep) {
  out << "cube_index,q_vector,block_lo,block_hi,certificate,min_average,max_average\n";
  for (const auto& c : rep.cubes) {
    std::string q;
    for (std::size_t k = 0; k < c.q.size(); ++k) q += (k ? ";" : "") + std::to_string(c.q[k]);
    std::string lo = "", hi = "";
    if (!c.sample_averages.empty()) {
      auto [mn, mx] = std::minmax_element(c.sample_averages.begin(), c.sample_averages.end());
      lo = to_fraction_string(*mn);
      hi = to_fraction_string(*mx);
    }
    out << c.cube_index << "," << q << "," << c.block.lo << "," << c.block.hi << ","
        << (c.certificate_pass ? 1 : 0) << "," << lo << "," << hi << "\n";
  }
}

}  // namespace sweepout::io
