#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lapoleaf/dataset.hpp"
#include "lapoleaf/distance.hpp"
#include "lapoleaf/leading_tree.hpp"
#include "lapoleaf/lodog.hpp"

namespace lapoleaf {

enum class Stage { initialized, after_c2p, after_r2r, after_p2c };

/// Soft label vectors plus explicit labeled flags.
///
/// A point counts as labeled once it carries label information, whatever
/// the sign of its components; the flag is tracked separately so negative
/// components produced during the top-down pass or a zero regression
/// target never read as "unlabeled".
struct LabelState {
  Matrix labels;  ///< N x K (K = 1 in regression)
  std::vector<std::uint8_t> is_labeled;
  std::vector<std::uint8_t> is_ground_truth;  ///< labeled from the input data
  Stage stage = Stage::initialized;

  std::size_t size() const noexcept { return labels.rows(); }
  std::size_t width() const noexcept { return labels.cols(); }
  bool all_labeled() const noexcept;
};

/// Rows are one-hot (classification) or the target (regression) for known
/// labels and zero otherwise. Throws ValidationError when nothing is labeled
/// or classification has fewer than two classes.
LabelState init_labels(const Dataset& data);

/// W_i = pop_i / d(i, p). A zero distance throws InvariantError: it means
/// duplicates were not merged.
double edge_weight(const DistanceMatrix& dm, std::span<const std::size_t> pop, std::size_t i,
                   std::size_t p);

/// Which children contribute weight to the denominator of the bottom-up mean.
enum class C2pWeights {
  labeled,  ///< only labeled children; the parent is their weighted mean
  all,      ///< every child; unlabeled ones add weight but a zero vector
};

/// Children to parent, bottom-up. Each unlabeled parent with at least one
/// labeled child becomes the W-weighted mean of its children's vectors,
/// unlabeled children counting as zero vectors. Labeled parents are left
/// untouched.
LabelState c2p(LabelState state, const LeadingForest& forest, const DistanceMatrix& dm,
               std::span<const std::size_t> pop, C2pWeights weights = C2pWeights::labeled);

/// Root to root. The whole-tree root, if unlabeled, copies the nearest
/// labeled root; every other unlabeled root then copies the nearest labeled
/// root that is its superior in the whole tree. Borrowed labels are not
/// lent on within the same pass. Distance ties go to the lower index.
LabelState r2r(LabelState state, const LeadingForest& forest, const LeadingTree& tree,
               const DistanceMatrix& dm);

/// How the top-down pass fills unlabeled children of a parent that also
/// has labeled children. With S = sum of W over labeled children and
/// T = sum of W over all children:
///   v = L_p - (sum over labeled W_i L_i) / T
enum class P2cRule {
  raw,       ///< v as is; the positive factor C = T / (T - S) is dropped
  rescaled,  ///< C * v, so the children's weighted mean reproduces L_p exactly
  /// rescaled, except that children of a ground-truth parent copy it: such
  /// a parent is not the mean of its children, and extrapolating through
  /// it amplifies the spread of the labeled siblings.
  anchored,
};

/// raw for classification (argmax ignores C), anchored for regression.
P2cRule default_p2c_rule(TaskMode mode);

/// Parent to children, top-down. When every child of a parent is
/// unlabeled each copies the parent; with mixed children the unlabeled
/// ones are filled per `rule`. Labeled children are never overwritten, so
/// the result may carry negative components.
LabelState p2c(LabelState state, const LeadingForest& forest, const DistanceMatrix& dm,
               std::span<const std::size_t> pop, P2cRule rule = P2cRule::raw);

struct Predictions {
  TaskMode mode = TaskMode::classification;
  /// Class id (classification) or predicted value (regression) per point.
  std::vector<double> value;
  Matrix scores;
};

/// Argmax per row with ties to the lowest class id, or the scalar in
/// regression mode.
Predictions finalize(const LabelState& state, TaskMode mode);
Predictions finalize(LabelState&& state, TaskMode mode);

/// init_labels -> c2p -> r2r -> p2c -> finalize, with the default rules.
Predictions propagate(const Dataset& data, const LeadingForest& forest, const LeadingTree& tree,
                      const DistanceMatrix& dm);
LabelState propagate_state(const Dataset& data, const LeadingForest& forest,
                           const LeadingTree& tree, const DistanceMatrix& dm);

}  // namespace lapoleaf
