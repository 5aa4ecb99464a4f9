#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glqr/graphon.hpp"
#include "glqr/trig.hpp"

namespace glqr {

// Declarative experiment description, parsed from a flat sectioned text file
// (key = value lines, '#' comments). Exactly one coupling source and one
// subspace source per file; every referenced path must resolve at load time.
struct ExperimentConfig {
  enum class Mode { kExact, kApproximate, kOscillator };
  enum class CouplingType { kCsv, kDictionary, kSbm, kBlock };
  enum class BasisSource { kEigenbasis, kGridCsv, kDictionary };
  // Where a kernel comes from within the coupling section.
  enum class KernelSource { kSample, kSameAsA, kZero };

  Mode mode = Mode::kExact;

  // [model]
  int n = 1;
  double horizon = 1.0;
  int steps = 200;
  Eigen::MatrixXd L_a, D_a, L_b, D_b, L_q, D_q, L_qT, D_qT;
  // oscillator variant
  double alpha = 0.0, beta = 0.0, eta = 0.0;
  Eigen::Matrix2d osc_Q = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d osc_QT = Eigen::Matrix2d::Identity();

  // [coupling]
  CouplingType coupling = CouplingType::kCsv;
  double bound = 0.0;  // 0: derive from data
  std::string a_path, b_path, q_path, qt_path;  // csv type ("" = zero kernel)
  std::vector<TrigFunction> dictionary;
  Eigen::MatrixXd dict_A, dict_B, dict_Q, dict_QT;
  int dict_grid = 0;
  SbmSpec sbm;
  KernelSource b_source = KernelSource::kZero;
  KernelSource q_source = KernelSource::kZero;
  KernelSource qt_source = KernelSource::kZero;

  // [subspace]
  BasisSource basis_source = BasisSource::kEigenbasis;
  int subspace_dim = 1;
  std::string basis_path;
  std::vector<TrigFunction> basis_elements;

  // [init]
  std::uint64_t init_seed = 0;
  double init_lo = -1.0, init_hi = 1.0;

  // [output]
  std::string output_dir = "out";
};

ExperimentConfig load_config(const std::string& path);

// Parsing helpers shared with the CLI.
Eigen::MatrixXd parse_matrix(const std::string& text, int expected_dim);
std::vector<TrigFunction> parse_dictionary(const std::string& text);

// FNV-1a over the raw file bytes, printed as 16 hex digits; stamps the
// manifest so reruns can be matched to their configuration.
std::string hash_file(const std::string& path);

}  // namespace glqr
