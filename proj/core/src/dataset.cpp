#include "decsliding/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace decsliding {

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ArgumentError("Dataset::slice: bad range");
  Dataset out;
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    labels.begin() + static_cast<std::ptrdiff_t>(end));
  out.features = features.middleRows(static_cast<Eigen::Index>(begin),
                                     static_cast<Eigen::Index>(end - begin));
  out.features.makeCompressed();
  return out;
}

Partition partition_evenly(std::size_t n, int m) {
  if (m < 1) throw ArgumentError("partition_evenly: need at least one agent");
  Partition p;
  p.offsets.resize(static_cast<std::size_t>(m) + 1);
  const std::size_t base = n / static_cast<std::size_t>(m);
  const std::size_t extra = n % static_cast<std::size_t>(m);
  p.offsets[0] = 0;
  for (int i = 0; i < m; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    p.offsets[k + 1] = p.offsets[k] + base + (k < extra ? 1 : 0);
  }
  return p;
}

namespace {

struct RawSample {
  double raw_label;
  std::vector<std::pair<int, double>> entries;  // 0-based
};

bool parse_double(std::string_view s, double& out) {
  // from_chars for double is available in libstdc++ 11.
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

RawSample parse_line(const std::string& line, std::size_t lineno) {
  std::istringstream ls(line);
  std::string tok;
  RawSample s{};
  if (!(ls >> tok) || !parse_double(tok, s.raw_label)) {
    throw ParseError("cannot parse label '" + tok + "'", lineno);
  }
  int last_index = 0;
  while (ls >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
      throw ParseError("malformed feature '" + tok + "' (expected idx:val)", lineno);
    }
    int idx = 0;
    const std::string_view idx_sv(tok.data(), colon);
    auto [ptr, ec] = std::from_chars(idx_sv.data(), idx_sv.data() + idx_sv.size(), idx);
    if (ec != std::errc() || ptr != idx_sv.data() + idx_sv.size() || idx < 1) {
      throw ParseError("bad feature index in '" + tok + "'", lineno);
    }
    if (idx <= last_index) throw ParseError("feature indices must increase", lineno);
    last_index = idx;
    double val = 0.0;
    if (!parse_double(std::string_view(tok).substr(colon + 1), val)) {
      throw ParseError("bad feature value in '" + tok + "'", lineno);
    }
    s.entries.emplace_back(idx - 1, val);
  }
  return s;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<RawSample> raw;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    raw.push_back(parse_line(line, lineno));
    line_of.push_back(lineno);
  }
  if (raw.empty()) throw ParseError("no samples in input", 0);

  std::set<double> label_set;
  for (const auto& s : raw) label_set.insert(s.raw_label);
  const bool zero_one = label_set.count(0.0) > 0;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    const double v = raw[s].raw_label;
    const bool ok = zero_one ? (v == 0.0 || v == 1.0) : (v == 1.0 || v == -1.0);
    if (!ok) {
      std::ostringstream msg;
      msg << "unknown label " << v << (zero_one ? " (file uses {0, 1})" : " (expected -1 or +1)");
      throw ParseError(msg.str(), line_of[s]);
    }
  }

  Eigen::Index max_index = 0;
  for (const auto& s : raw) {
    if (!s.entries.empty()) max_index = std::max<Eigen::Index>(max_index, s.entries.back().first + 1);
  }
  Eigen::Index dim = max_index;
  if (options.dim > 0) {
    if (options.dim < max_index) {
      throw ParseError("feature index " + std::to_string(max_index) + " exceeds dimension " +
                           std::to_string(options.dim),
                       0);
    }
    dim = options.dim;
  }
  if (dim == 0) dim = 1;

  std::vector<std::size_t> keep(raw.size());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  if (options.subsample > 0 && options.subsample < raw.size()) {
    std::mt19937_64 rng(options.subsample_seed);
    std::shuffle(keep.begin(), keep.end(), rng);
    keep.resize(options.subsample);
    std::sort(keep.begin(), keep.end());
  }

  Dataset data;
  data.labels.reserve(keep.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto& s = raw[keep[r]];
    data.labels.push_back(s.raw_label > 0.5 ? 1.0 : -1.0);
    for (const auto& [j, v] : s.entries) {
      triplets.emplace_back(static_cast<Eigen::Index>(r), j, v);
    }
  }
  data.features.resize(static_cast<Eigen::Index>(keep.size()), dim);
  data.features.setFromTriplets(triplets.begin(), triplets.end());
  data.features.makeCompressed();
  return data;
}

Dataset load_libsvm(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_libsvm(in, options);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    out << (data.labels[static_cast<std::size_t>(r)] > 0 ? "+1" : "-1");
    for (SparseRows::InnerIterator it(data.features, r); it; ++it) {
      out << ' ' << (it.col() + 1) << ':' << it.value();
    }
    out << '\n';
  }
}

}  // namespace decsliding
