#ifndef DECSLIDING_DATASET_HPP
#define DECSLIDING_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "decsliding/types.hpp"

namespace decsliding {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Labeled sparse samples. Row s of features is u_s, labels[s] is v_s in {-1, +1}.
struct Dataset {
  std::vector<double> labels;
  SparseRows features;

  std::size_t size() const noexcept { return labels.size(); }
  Eigen::Index dim() const noexcept { return features.cols(); }

  /// Rows [begin, end) as a standalone dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;
};

/// Contiguous near-even split: agent i owns [offsets[i], offsets[i + 1]).
struct Partition {
  std::vector<std::size_t> offsets;

  int agents() const noexcept { return static_cast<int>(offsets.size()) - 1; }
  std::size_t begin(int i) const { return offsets.at(static_cast<std::size_t>(i)); }
  std::size_t end(int i) const { return offsets.at(static_cast<std::size_t>(i) + 1); }
  std::size_t count(int i) const { return end(i) - begin(i); }
};

/// Splits n samples over m agents; shard sizes differ by at most one.
Partition partition_evenly(std::size_t n, int m);

struct LibsvmOptions {
  /// Feature dimension; 0 means the largest index seen.
  Eigen::Index dim = 0;
  /// Keep this many samples (0 = all), chosen uniformly without replacement
  /// with subsample_seed and kept in file order.
  std::size_t subsample = 0;
  std::uint64_t subsample_seed = 0;
};

/// Reads LIBSVM sparse text: "label idx:val idx:val ..." with 1-based,
/// strictly increasing indices. Labels must be {-1, +1} or {0, 1} (0 maps to
/// -1). Blank lines are skipped. Throws ParseError with the offending line.
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
Dataset load_libsvm(const std::string& path, const LibsvmOptions& options = {});

void write_libsvm(std::ostream& out, const Dataset& data);

}  // namespace decsliding

#endif
