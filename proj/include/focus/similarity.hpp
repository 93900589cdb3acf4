#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "focus/corpus.hpp"

namespace focus {

// TF-IDF weighted invocation profile of one project. Index = invocation id.
template <typename Scalar>
struct BasicFeatureVector {
  std::string owner;
  Eigen::SparseVector<Scalar> weights;
};

using FeatureVector = BasicFeatureVector<double>;

// Cosine of two sparse vectors. Sums run in ascending index order so the
// result does not depend on storage layout; zero norm on either side gives 0.
template <typename Scalar>
Scalar cosine(const Eigen::SparseVector<Scalar>& u, const Eigen::SparseVector<Scalar>& v) {
  using Iter = typename Eigen::SparseVector<Scalar>::InnerIterator;
  Scalar dot(0), uu(0), vv(0);
  for (Iter it(u); it; ++it) uu += it.value() * it.value();
  for (Iter it(v); it; ++it) vv += it.value() * it.value();
  Iter a(u), b(v);
  while (a && b) {
    if (a.index() < b.index()) {
      ++a;
    } else if (b.index() < a.index()) {
      ++b;
    } else {
      dot += a.value() * b.value();
      ++a;
      ++b;
    }
  }
  if (uu == Scalar(0) || vv == Scalar(0)) return Scalar(0);
  using std::sqrt;
  return dot / (sqrt(uu) * sqrt(vv));
}

template <typename Scalar>
Scalar cosine(const BasicFeatureVector<Scalar>& u, const BasicFeatureVector<Scalar>& v) {
  return cosine(u.weights, v.weights);
}

// |A ∩ B| / |A ∪ B| over sorted, de-duplicated sets. Two empty sets give 0.
double jaccard(std::span<const InvocationId> a, std::span<const InvocationId> b);
double jaccard(const Declaration& d, const Declaration& e);

struct ProjectNeighbor {
  std::size_t project = 0;  // corpus index
  double score = 0.0;
};

struct DeclarationNeighbor {
  std::size_t project = 0;  // corpus index
  std::size_t declaration = 0;
  double score = 0.0;
};

// Descending by score; ties in ascending key order. The anchor itself is
// never a member.
template <typename Neighbor>
struct NeighborSet {
  std::string anchor;
  std::vector<Neighbor> neighbors;

  bool empty() const noexcept { return neighbors.empty(); }
  std::size_t size() const noexcept { return neighbors.size(); }
  auto begin() const noexcept { return neighbors.begin(); }
  auto end() const noexcept { return neighbors.end(); }
  const Neighbor& operator[](std::size_t i) const { return neighbors[i]; }
};

// The project under development. It may be a corpus member (same id) or a
// transient project; invocation ids at or beyond the corpus vocabulary size
// stand for invocations the corpus has never seen.
struct ActiveProject {
  std::string id;
  std::vector<Declaration> declarations;
  std::size_t active = 0;

  const Declaration& active_declaration() const { return declarations.at(active); }
};

// A subset of corpus projects used as background data, with frequencies
// recomputed over the subset. Holds a reference: the corpus must outlive it.
class Background {
 public:
  explicit Background(const Corpus& corpus);
  Background(const Corpus& corpus, std::vector<std::size_t> members);

  const Corpus& corpus() const noexcept { return *corpus_; }
  std::span<const std::size_t> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  std::uint32_t project_count(InvocationId id) const { return project_count_.at(id.value); }
  std::uint32_t declaration_count(InvocationId id) const { return declaration_count_.at(id.value); }

  // Position in members() of the corpus project with this id, if present.
  std::optional<std::size_t> position_of(std::string_view project_id) const;

  // Row per member, column per invocation; value = number of call sites.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& frequencies() const noexcept {
    return frequencies_;
  }

 private:
  void build();

  const Corpus* corpus_;
  std::vector<std::size_t> members_;
  std::vector<std::uint32_t> project_count_;
  std::vector<std::uint32_t> declaration_count_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> frequencies_;
};

// Features of a corpus member against corpus-wide frequencies:
// weight(i) = f_i * ln(|P| / a_i).
FeatureVector project_features(const Corpus& corpus, const Project& project);

// Features of the active project within the graph formed by the background
// plus the active project (replacing a background member with the same id).
FeatureVector project_features(const Background& background, const ActiveProject& active);

NeighborSet<ProjectNeighbor> top_k_projects(const Background& background, const ActiveProject& active,
                                            std::size_t k);
NeighborSet<ProjectNeighbor> top_k_projects(const Corpus& corpus, const Project& active, std::size_t k);

// Declarations of the neighbor projects with positive Jaccard against the
// active declaration; ties by (project id, declaration name).
NeighborSet<DeclarationNeighbor> top_m_declarations(const Corpus& corpus,
                                                    const NeighborSet<ProjectNeighbor>& projects,
                                                    const Declaration& active, std::size_t m);

// Copies a corpus project into the active-project form.
ActiveProject as_active(const Project& project, std::size_t active_index);

}  // namespace focus
