#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <froth/profile.hpp>

namespace froth {

enum class PartitionKind { regular_delta, regular_delta0, adapted };

struct BlockLabel {
  bool low_energy = false;
  BlockType type = BlockType::zero;
  double internal_energy = 0.0;
};

// Blocks [lines[i], lines[i+1]] tiling [0, L].
struct BlockPartition {
  std::vector<double> lines;
  PartitionKind kind = PartitionKind::regular_delta;
  std::vector<BlockLabel> labels;
  double alpha_L = 1.0;

  std::size_t size() const { return lines.empty() ? 0 : lines.size() - 1; }
  Interval block(std::size_t i) const { return {lines[i], lines[i + 1]}; }
  double L() const { return lines.back(); }
};

// alpha_L(delta) = inf { alpha >= 1 : (L / alpha) gamma^delta integer }.
double alpha_L(double L, double delta, double gamma);

// M_L equal blocks of length alpha_L gamma^-delta. Throws DomainTooShort if
// L < gamma^-delta.
BlockPartition regular_partition(double L, double delta, double gamma,
                                 PartitionKind kind = PartitionKind::regular_delta);

// Rounds block lines to the nearest grid line. Lengths change by at most dx.
BlockPartition snap_to_grid(const BlockPartition& p, double dx);

// Piecewise constant on the delta0 partition with the block means of p.
GridProfile coarse_version(const GridProfile& p, double delta0, double gamma);

}  // namespace froth
