#include "glqr/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "glqr/errors.hpp"

namespace glqr {

namespace {

std::string trim(const std::string& s) {
  const auto l = s.find_first_not_of(" \t\r");
  if (l == std::string::npos) return "";
  const auto r = s.find_last_not_of(" \t\r");
  return s.substr(l, r - l + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config: bad number '" + s + "' for " + what);
  return v;
}

long parse_int(const std::string& s, const std::string& what) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config: bad integer '" + s + "' for " + what);
  return v;
}

// Sectioned key=value scanner with consumption tracking, so typos surface as
// "unknown key" errors rather than silent defaults.
class ConfigFile {
 public:
  explicit ConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config: unterminated section header at line " +
                            std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: expected key = value at line " +
                          std::to_string(lineno));
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config: empty key at line " +
                                         std::to_string(lineno));
      auto& kv = sections_[section];
      if (kv.count(key))
        throw ConfigError("config: duplicate key '" + key + "' in [" + section + "]");
      kv[key] = value;
    }
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

  std::optional<std::string> get(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    consumed_.insert(section + "/" + key);
    return k->second;
  }

  std::string require(const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v)
      throw ConfigError("config: missing required key '" + key + "' in [" +
                        section + "]");
    return *v;
  }

  void finish() const {
    for (const auto& [section, kv] : sections_)
      for (const auto& [key, value] : kv)
        if (!consumed_.count(section + "/" + key))
          throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::set<std::string> consumed_;
};

ExperimentConfig::KernelSource parse_kernel_source(const std::string& v,
                                                   const std::string& what) {
  if (v == "sample") return ExperimentConfig::KernelSource::kSample;
  if (v == "same_as_a") return ExperimentConfig::KernelSource::kSameAsA;
  if (v == "zero") return ExperimentConfig::KernelSource::kZero;
  throw ConfigError("config: " + what + " must be sample, same_as_a or zero");
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config: " + what + " path does not resolve: " + path);
}

}  // namespace

Eigen::MatrixXd parse_matrix(const std::string& text, int expected_dim) {
  const auto rows = split(text, ';');
  std::vector<std::vector<double>> data;
  for (const auto& r : rows) {
    data.emplace_back();
    for (const auto& field : split(r, ','))
      data.back().push_back(parse_double(field, "matrix entry"));
    if (data.back().size() != data.front().size())
      throw ConfigError("config: ragged matrix literal '" + text + "'");
  }
  // Scalar shorthand: a single value v stands for v * I when a square matrix
  // of known dimension is expected.
  if (expected_dim > 1 && data.size() == 1 && data[0].size() == 1)
    return data[0][0] *
           Eigen::MatrixXd::Identity(expected_dim, expected_dim);
  Eigen::MatrixXd m(data.size(), data.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = data[i][j];
  if (expected_dim > 0 && (m.rows() != expected_dim || m.cols() != expected_dim))
    throw ConfigError("config: matrix literal has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(expected_dim) + "x" +
                      std::to_string(expected_dim));
  return m;
}

std::vector<TrigFunction> parse_dictionary(const std::string& text) {
  std::vector<TrigFunction> out;
  for (const auto& name : split(text, ','))
    out.push_back(TrigFunction::parse(name));
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  ConfigFile file(path);
  ExperimentConfig cfg;

  const std::string mode = file.require("", "mode");
  if (mode == "exact") {
    cfg.mode = ExperimentConfig::Mode::kExact;
  } else if (mode == "approximate") {
    cfg.mode = ExperimentConfig::Mode::kApproximate;
  } else if (mode == "oscillator") {
    cfg.mode = ExperimentConfig::Mode::kOscillator;
  } else {
    throw ConfigError("config: mode must be exact, approximate or oscillator");
  }

  // [model]
  if (cfg.mode == ExperimentConfig::Mode::kOscillator) {
    cfg.n = 2;
    cfg.alpha = parse_double(file.require("model", "alpha"), "alpha");
    cfg.beta = parse_double(file.require("model", "beta"), "beta");
    cfg.eta = parse_double(file.require("model", "eta"), "eta");
    cfg.osc_Q = parse_matrix(file.require("model", "Q"), 2);
    cfg.osc_QT = parse_matrix(file.require("model", "QT"), 2);
  } else {
    cfg.n = static_cast<int>(parse_int(file.require("model", "n"), "n"));
    if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
    cfg.L_a = parse_matrix(file.require("model", "L_a"), cfg.n);
    cfg.D_a = parse_matrix(file.require("model", "D_a"), cfg.n);
    cfg.L_b = parse_matrix(file.require("model", "L_b"), cfg.n);
    cfg.D_b = parse_matrix(file.require("model", "D_b"), cfg.n);
    cfg.L_q = parse_matrix(file.require("model", "L_q"), cfg.n);
    cfg.D_q = parse_matrix(file.require("model", "D_q"), cfg.n);
    cfg.L_qT = parse_matrix(file.require("model", "L_qT"), cfg.n);
    cfg.D_qT = parse_matrix(file.require("model", "D_qT"), cfg.n);
  }
  cfg.horizon = parse_double(file.require("model", "horizon"), "horizon");
  if (!(cfg.horizon > 0)) throw ConfigError("config: horizon must be positive");
  cfg.steps = static_cast<int>(parse_int(file.require("model", "steps"), "steps"));
  if (cfg.steps < 1) throw ConfigError("config: steps must be >= 1");

  // [coupling]
  const std::string ctype = file.require("coupling", "type");
  if (auto b = file.get("coupling", "bound"))
    cfg.bound = parse_double(*b, "bound");
  if (ctype == "csv") {
    cfg.coupling = ExperimentConfig::CouplingType::kCsv;
    cfg.a_path = file.require("coupling", "A");
    require_file(cfg.a_path, "coupling A");
    auto path_or_empty = [&](const char* key, std::string& dest) {
      if (auto v = file.get("coupling", key)) {
        if (*v != "zero") {
          dest = (*v == "same_as_a") ? cfg.a_path : *v;
          require_file(dest, std::string("coupling ") + key);
        }
      }
    };
    path_or_empty("B", cfg.b_path);
    path_or_empty("Q", cfg.q_path);
    path_or_empty("QT", cfg.qt_path);
  } else if (ctype == "dictionary") {
    cfg.coupling = ExperimentConfig::CouplingType::kDictionary;
    cfg.dictionary = parse_dictionary(file.require("coupling", "dictionary"));
    const int m = static_cast<int>(cfg.dictionary.size());
    cfg.dict_A = parse_matrix(file.require("coupling", "A"), m);
    auto coeffs_or_zero = [&](const char* key) {
      if (auto v = file.get("coupling", key)) return parse_matrix(*v, m);
      return Eigen::MatrixXd::Zero(m, m).eval();
    };
    cfg.dict_B = coeffs_or_zero("B");
    cfg.dict_Q = coeffs_or_zero("Q");
    cfg.dict_QT = coeffs_or_zero("QT");
    cfg.dict_grid =
        static_cast<int>(parse_int(file.require("coupling", "grid"), "grid"));
    if (cfg.dict_grid < 1) throw ConfigError("config: coupling grid must be >= 1");
  } else if (ctype == "sbm" || ctype == "block") {
    cfg.coupling = ctype == "sbm" ? ExperimentConfig::CouplingType::kSbm
                                  : ExperimentConfig::CouplingType::kBlock;
    cfg.sbm.block_probs = parse_matrix(file.require("coupling", "block_probs"), -1);
    for (const auto& s : split(file.require("coupling", "block_sizes"), ','))
      cfg.sbm.block_sizes.push_back(
          static_cast<int>(parse_int(s, "block size")));
    if (ctype == "sbm")
      cfg.sbm.seed = static_cast<std::uint64_t>(
          parse_int(file.require("coupling", "seed"), "coupling seed"));
    cfg.sbm.validate();
    auto source_or = [&](const char* key, ExperimentConfig::KernelSource dflt) {
      if (auto v = file.get("coupling", key)) return parse_kernel_source(*v, key);
      return dflt;
    };
    cfg.b_source = source_or("B", ExperimentConfig::KernelSource::kZero);
    cfg.q_source = source_or("Q", ExperimentConfig::KernelSource::kZero);
    cfg.qt_source = source_or("QT", ExperimentConfig::KernelSource::kZero);
  } else {
    throw ConfigError("config: coupling type must be csv, dictionary, sbm or block");
  }

  // [subspace]
  const std::string bsource = file.require("subspace", "source");
  if (bsource == "eigenbasis") {
    cfg.basis_source = ExperimentConfig::BasisSource::kEigenbasis;
    cfg.subspace_dim =
        static_cast<int>(parse_int(file.require("subspace", "d"), "d"));
    if (cfg.subspace_dim < 1) throw ConfigError("config: d must be >= 1");
  } else if (bsource == "grid_csv") {
    cfg.basis_source = ExperimentConfig::BasisSource::kGridCsv;
    cfg.basis_path = file.require("subspace", "path");
    require_file(cfg.basis_path, "subspace basis");
  } else if (bsource == "dictionary") {
    cfg.basis_source = ExperimentConfig::BasisSource::kDictionary;
    cfg.basis_elements = parse_dictionary(file.require("subspace", "elements"));
    cfg.subspace_dim = static_cast<int>(cfg.basis_elements.size());
  } else {
    throw ConfigError("config: subspace source must be eigenbasis, grid_csv or dictionary");
  }

  // [init]
  cfg.init_seed = static_cast<std::uint64_t>(
      parse_int(file.require("init", "seed"), "init seed"));
  const auto range = split(file.require("init", "range"), ',');
  if (range.size() == 1) {
    const double r = parse_double(range[0], "init range");
    if (!(r > 0)) throw ConfigError("config: symmetric init range must be positive");
    cfg.init_lo = -r;
    cfg.init_hi = r;
  } else if (range.size() == 2) {
    cfg.init_lo = parse_double(range[0], "init range low");
    cfg.init_hi = parse_double(range[1], "init range high");
    if (!(cfg.init_lo < cfg.init_hi))
      throw ConfigError("config: init range must satisfy lo < hi");
  } else {
    throw ConfigError("config: init range must be 'r' or 'lo, hi'");
  }

  // [output]
  if (auto dir = file.get("output", "dir")) cfg.output_dir = *dir;

  file.finish();
  return cfg;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path + " for hashing");
  std::uint64_t hash = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace glqr
