#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "focus/corpus.hpp"
#include "focus/similarity.hpp"

namespace focus {

// Project x declaration x invocation ratings. One sparse binary slice per
// corpus project: cell (d, i) is 1 iff declaration d invokes i.
class RatingTensor {
 public:
  using Slice = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  explicit RatingTensor(const Corpus& corpus);

  const Slice& slice(std::size_t project) const { return slices_.at(project); }
  std::size_t projects() const noexcept { return slices_.size(); }

  // r_{d,i,q}: 0 or 1.
  double rating(std::size_t project, std::size_t declaration, InvocationId id) const;

  // Sorted invocation ids of one row.
  std::span<const int> row(std::size_t project, std::size_t declaration) const;

  std::size_t nonzeros() const noexcept { return nonzeros_; }

 private:
  std::vector<Slice> slices_;
  std::size_t nonzeros_ = 0;
};

struct EngineOptions {
  std::size_t k = 4;   // neighbor projects
  std::size_t M = 25;  // neighbor declarations
  std::size_t N = 20;  // cut-off
  // Experimental: weight each neighbor rating by the similarity of its
  // project instead of using the project only for neighbor selection.
  bool similarity_weighted = false;
};

struct RecommendationItem {
  InvocationId invocation;
  double score = 0.0;
};

struct RecommendationList {
  std::vector<RecommendationItem> items;
  bool fallback_used = false;
  double elapsed_seconds = 0.0;
  NeighborSet<ProjectNeighbor> projects;
  NeighborSet<DeclarationNeighbor> declarations;
};

struct SnippetRecommendation {
  std::string declaration_name;
  std::string project_id;
  double jaccard_score = 0.0;
  std::optional<std::string> body;
  std::vector<std::string> invocation_sequence;
};

// Binary row mean: |unique invocations| / vocabulary size.
double mean_rating(const Declaration& d, std::size_t vocabulary_size);

// Rating of neighbor declaration (project, declaration) for `id`, combined
// over the neighbor projects containing it. A declaration lives in exactly
// one project, so this is the cell of that project's slice, or 0 when the
// project's similarity is 0. Throws std::invalid_argument when the project is
// not among `projects`.
double combined_rating(const RatingTensor& tensor, std::size_t project, std::size_t declaration,
                       InvocationId id, const NeighborSet<ProjectNeighbor>& projects,
                       bool similarity_weighted = false);

// Mean-offset collaborative-filtering prediction for one missing cell of the
// active declaration. std::nullopt when the neighbor declarations carry no
// similarity (caller falls back to the baseline).
std::optional<double> predict_rating(const RatingTensor& tensor, const Declaration& active, InvocationId id,
                                     const NeighborSet<DeclarationNeighbor>& declarations,
                                     const NeighborSet<ProjectNeighbor>& projects, std::size_t vocabulary_size,
                                     bool similarity_weighted = false);

// Top-N invocations by declaration count over the background, excluding
// `known`; score normalised by the largest count.
RecommendationList popularity_baseline(const Background& background, std::span<const InvocationId> known,
                                       std::size_t n);

RecommendationList recommend_apis(const Background& background, const RatingTensor& tensor,
                                  const ActiveProject& active, const EngineOptions& options);

std::vector<SnippetRecommendation> recommend_snippets(const Corpus& corpus, const RecommendationList& recs,
                                                      const Declaration& active,
                                                      const NeighborSet<ProjectNeighbor>& projects,
                                                      std::size_t query_size, std::size_t count);

// Owns a corpus and the structures derived from it; immutable and safe to
// query from many threads.
class Engine {
 public:
  explicit Engine(Corpus corpus);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const Corpus& corpus() const noexcept { return corpus_; }
  const Background& background() const noexcept { return background_; }
  const RatingTensor& tensor() const noexcept { return tensor_; }

  RecommendationList recommend(const ActiveProject& active, const EngineOptions& options) const {
    return recommend_apis(background_, tensor_, active, options);
  }

 private:
  Corpus corpus_;
  Background background_;
  RatingTensor tensor_;
};

}  // namespace focus
