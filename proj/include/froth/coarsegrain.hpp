#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <froth/certificate.hpp>
#include <froth/model.hpp>
#include <froth/partition.hpp>
#include <froth/profile.hpp>

namespace froth {

struct CoarseGrainConfig {
  double delta = 0.2;
  double rho = 0.04;
  double ell_minus = 0.25;
  double c0 = 0.05;
  double kappa = 1.0;
  double energy_cutoff_multiplier = 2.0;
  // flat runs must be at least max(ell_minus, C_bar gamma^{-(delta - 2 rho)}) long
  double C_bar = 0.0;
  // throw InvariantError instead of falling back on degenerate replacements
  bool strict = false;

  void validate() const;
};

// zeta = c0 gamma^delta log^2 gamma
double cg_zeta(double gamma, const CoarseGrainConfig& cfg);
// m_bar = m_beta - kappa gamma^{delta/2}
double cg_m_bar(double m_beta, double gamma, const CoarseGrainConfig& cfg);

struct FlatSegment {
  int omega = 0;
  double a = 0.0;
  double b = 0.0;
  int blocks = 0;
  double mid() const { return 0.5 * (a + b); }
};

// Longest run of small blocks (global lattice of spacing ell_minus) inside
// [block.a + margin_left, block.b - margin_right] whose averages lie within
// gamma^rho of omega m_beta. Ties go to the leftmost run. nullopt if none is
// long enough.
std::optional<FlatSegment> find_flat_segment(const GridProfile& p, const Interval& block,
                                             const ModelParams& params,
                                             const CoarseGrainConfig& cfg, double margin_left,
                                             double margin_right);

enum class SegmentKind { single_good_block, bad_run };
std::string to_string(SegmentKind k);

struct AdaptedBlock {
  Interval I;
  bool good = false;
  bool boundary = false;  // good block touching 0 or L
  int omega_left = 0;     // sign at the left/right line, 0 if none
  int omega_right = 0;
  double mean = 0.0;
  double internal_energy = 0.0;
};

struct Segment {
  Interval I;
  SegmentKind kind = SegmentKind::bad_run;
  std::size_t first = 0;  // adapted block range [first, last)
  std::size_t last = 0;
};

struct AdaptedPartition {
  BlockPartition regular;  // snapped P_delta with low-energy labels
  std::vector<std::optional<FlatSegment>> flats;
  BlockPartition blocks;   // kind = adapted
  std::vector<AdaptedBlock> info;
  std::vector<Segment> segments;
  double ell_plus = 0.0;
  int demoted = 0;         // low-energy blocks without a flat segment
};

std::vector<BlockLabel> classify_blocks(const GridProfile& p, const BlockPartition& part,
                                        const ModelParams& params,
                                        double cutoff_multiplier = 2.0);

AdaptedPartition adapted_partition(const GridProfile& p, const ModelParams& params,
                                   const CoarseGrainConfig& cfg);

struct ReplacementContext {
  enum class Kind { bad, good, boundary_good } kind = Kind::bad;
  int omega_left = 0;
  int omega_right = 0;
  // boundary_good only: domain end on the left of the block
  bool domain_on_left = true;
};

struct Replacement {
  StepProfile piece{{0.0, 1.0}, {0.0}};
  std::string case_name;
  bool margin_capped = false;
  bool degenerate = false;
};

// Replacement of a block of length ell and mean m_i; the piece lives on [0, ell].
Replacement replace_block(double ell, double m_i, const ReplacementContext& ctx,
                          const ModelParams& params, const CoarseGrainConfig& cfg);

struct BlockTrace {
  Interval I;
  std::string label;
  std::string case_name;
  double mean = 0.0;
  StepProfile piece{{0.0, 1.0}, {0.0}};
  bool margin_capped = false;
  bool degenerate = false;
};

struct CoarseGrainResult {
  StepProfile sigma{{0.0, 1.0}, {0.0}};
  AdaptedPartition partition;
  std::vector<BlockTrace> trace;
  double m_bar = 0.0;
  bool in_K = false;
  double max_mass_error = 0.0;
};

// Every profile is coarse grained as if it had open boundary conditions.
CoarseGrainResult coarse_grain(const GridProfile& p, const ModelParams& params,
                               const CoarseGrainConfig& cfg);

nlohmann::json trace_json(const CoarseGrainResult& r);

// E(phi) - E~(sigma_phi) per length against -C_cert gamma^{1 - delta}, both with
// open boundary conditions.
Certificate lower_bound_certificate(const GridProfile& p, const ModelParams& params,
                                    const CoarseGrainConfig& cfg, double C_cert = 10.0);

}  // namespace froth
