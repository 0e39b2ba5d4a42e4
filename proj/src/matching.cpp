#include "osc/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <string>

#include "osc/error.hpp"

namespace osc {

// Unbalanced kd-tree grown by insertion; node i splits on dimension
// depth % dim. Queries are exact: a subtree is skipped only when its slab is
// strictly farther than the current k-th best.
struct DescriptorIndex::Tree {
  struct Node {
    int split_dim = 0;
    int left = -1;
    int right = -1;
  };

  explicit Tree(int dim) : dim(dim) {}

  void Insert(const Eigen::VectorXd& key, DescriptorRef ref) {
    const int id = static_cast<int>(nodes.size());
    keys.push_back(key);
    refs.push_back(ref);
    nodes.emplace_back();
    if (id == 0) return;
    int cur = 0;
    int depth = 0;
    while (true) {
      Node& node = nodes[static_cast<std::size_t>(cur)];
      const int d = node.split_dim;
      int& next = key[d] < keys[static_cast<std::size_t>(cur)][d] ? node.left
                                                                  : node.right;
      ++depth;
      if (next < 0) {
        next = id;
        nodes[static_cast<std::size_t>(id)].split_dim = depth % dim;
        return;
      }
      cur = next;
    }
  }

  // Max-heap on (distance², insertion id).
  using Entry = std::pair<double, int>;

  void Search(int node_id, const Eigen::VectorXd& q, std::size_t k,
              std::priority_queue<Entry>& heap) const {
    if (node_id < 0) return;
    const auto idx = static_cast<std::size_t>(node_id);
    const Entry e{(keys[idx] - q).squaredNorm(), node_id};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
    const Node& node = nodes[idx];
    const double diff = q[node.split_dim] - keys[idx][node.split_dim];
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    Search(near, q, k, heap);
    if (heap.size() < k || diff * diff <= heap.top().first) {
      Search(far, q, k, heap);
    }
  }

  int dim;
  std::vector<Node> nodes;
  std::vector<Eigen::VectorXd> keys;
  std::vector<DescriptorRef> refs;
};

DescriptorIndex::DescriptorIndex(int dimension)
    : dimension_(dimension), tree_(std::make_unique<Tree>(dimension)) {
  if (dimension < 1) {
    throw Error(ErrorCategory::kPrecondition, "index dimension must be >= 1");
  }
}

DescriptorIndex::~DescriptorIndex() = default;

void DescriptorIndex::Insert(const Eigen::VectorXd& ring_key,
                             DescriptorRef ref) {
  if (ring_key.size() != dimension_) {
    throw Error(ErrorCategory::kPrecondition,
                "ring key of length " + std::to_string(ring_key.size()) +
                    " inserted into index of dimension " +
                    std::to_string(dimension_));
  }
  std::unique_lock lock(mutex_);
  tree_->Insert(ring_key, ref);
}

std::vector<Neighbor> DescriptorIndex::Query(const Eigen::VectorXd& ring_key,
                                             int k) const {
  if (ring_key.size() != dimension_) {
    throw Error(ErrorCategory::kPrecondition,
                "query key length does not match index dimension");
  }
  std::shared_lock lock(mutex_);
  std::vector<Neighbor> out;
  if (k <= 0 || tree_->nodes.empty()) return out;
  std::priority_queue<Tree::Entry> heap;
  tree_->Search(0, ring_key, static_cast<std::size_t>(k), heap);
  out.resize(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    const auto [d2, id] = heap.top();
    heap.pop();
    *it = {tree_->refs[static_cast<std::size_t>(id)], std::sqrt(d2)};
  }
  return out;
}

std::size_t DescriptorIndex::size() const {
  std::shared_lock lock(mutex_);
  return tree_->nodes.size();
}

std::set<std::uint32_t> QueryCandidateFrames(
    const DescriptorIndex& index, std::span<const ObjectScanContext> queries,
    int k, const std::function<bool(std::uint32_t)>& exclude) {
  if (k < 1) throw Error(ErrorCategory::kPrecondition, "k must be >= 1");
  std::set<std::uint32_t> frames;
  for (const auto& q : queries) {
    for (const auto& n : index.Query(q.ring_key, k)) {
      if (exclude && exclude(n.ref.frame_id)) continue;
      frames.insert(n.ref.frame_id);
    }
  }
  return frames;
}

int EstimateShift(const Eigen::VectorXd& sector_key_q,
                  const Eigen::VectorXd& sector_key_c) {
  const auto n = sector_key_q.size();
  if (sector_key_c.size() != n) {
    throw Error(ErrorCategory::kPrecondition, "sector key lengths differ");
  }
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < n; ++s) {
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double diff = sector_key_q[j] - sector_key_c[(j + s) % n];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(s);
    }
  }
  return best;
}

namespace {

double DistanceImpl(const Eigen::MatrixXd& q, const Eigen::MatrixXd& c,
                    int shift) {
  if (q.rows() != c.rows() || q.cols() != c.cols()) {
    throw Error(ErrorCategory::kPrecondition, "descriptor shapes differ");
  }
  const Eigen::Index cols = q.cols();
  const Eigen::Index rows = q.rows();
  double sum = 0.0;
  int valid = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Eigen::Index jc = (j + shift) % cols;
    double dot = 0.0, nq = 0.0, nc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double a = q(i, j);
      const double b = c(i, jc);
      dot += a * b;
      nq += a * a;
      nc += b * b;
    }
    if (nq <= 0.0 || nc <= 0.0) continue;
    // sqrt(nq * nc) rather than sqrt(nq) * sqrt(nc): identical columns then
    // give a cosine of exactly 1.
    const double cosine = std::clamp(dot / std::sqrt(nq * nc), -1.0, 1.0);
    sum += 1.0 - cosine;
    ++valid;
  }
  return valid == 0 ? 1.0 : sum / valid;
}

int CircularDistance(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

}  // namespace

double DescriptorDistance(const Eigen::MatrixXd& matrix_q,
                          const Eigen::MatrixXd& matrix_c) {
  return DistanceImpl(matrix_q, matrix_c, 0);
}

double ShiftedDescriptorDistance(const Eigen::MatrixXd& matrix_q,
                                 const Eigen::MatrixXd& matrix_c, int n) {
  const int cols = static_cast<int>(matrix_c.cols());
  if (cols == 0) return 1.0;
  return DistanceImpl(matrix_q, matrix_c, ((n % cols) + cols) % cols);
}

DescriptorMatch MatchDescriptors(const ObjectScanContext& osc_q,
                                 const ObjectScanContext& osc_c,
                                 const OscConfig& config) {
  if (osc_q.num_rings() != osc_c.num_rings() ||
      osc_q.num_sectors() != osc_c.num_sectors()) {
    throw Error(ErrorCategory::kPrecondition, "descriptor shapes differ");
  }
  const int sectors = osc_q.num_sectors();
  const int shift = EstimateShift(osc_q.sector_key, osc_c.sector_key);
  const int k = std::min(config.shift_window_halfwidth, (sectors - 1) / 2);

  // Visit offsets by circular distance to the coarse shift, smaller offset
  // first, so a strict '<' implements the tie-break.
  std::vector<int> window;
  for (int d = -k; d <= k; ++d) window.push_back(((shift + d) % sectors + sectors) % sectors);
  std::sort(window.begin(), window.end(), [&](int a, int b) {
    const int da = CircularDistance(a, shift, sectors);
    const int db = CircularDistance(b, shift, sectors);
    return da != db ? da < db : a < b;
  });

  DescriptorMatch best{window.front(), 0.0};
  double best_distance = std::numeric_limits<double>::infinity();
  for (const int n : window) {
    const double d = DistanceImpl(osc_q.matrix, osc_c.matrix, n);
    if (d < best_distance) {
      best_distance = d;
      best.offset = n;
    }
  }
  best.similarity = 1.0 - best_distance;
  return best;
}

MatchResult MatchPair(const ObjectScanContext& osc_q,
                      const ObjectScanContext& osc_c, const OscConfig& config) {
  const DescriptorMatch m = MatchDescriptors(osc_q, osc_c, config);
  MatchResult result;
  result.ref_q = RefOf(osc_q);
  result.ref_c = RefOf(osc_c);
  result.offset = m.offset;
  result.similarity = m.similarity;
  result.relative_pose = ComputeRelativePose(
      {osc_q.object.centroid_x, osc_q.object.centroid_y},
      {osc_c.object.centroid_x, osc_c.object.centroid_y},
      ShiftToAngle(m.offset, osc_q.num_sectors()));
  return result;
}

}  // namespace osc
