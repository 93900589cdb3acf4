#include "focus/similarity.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace focus {

double jaccard(std::span<const InvocationId> a, std::span<const InvocationId> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const auto united = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(united);
}

double jaccard(const Declaration& d, const Declaration& e) {
  const auto a = d.invocation_set();
  const auto b = e.invocation_set();
  return jaccard(a, b);
}

Background::Background(const Corpus& corpus) : corpus_(&corpus) {
  members_.resize(corpus.projects().size());
  std::iota(members_.begin(), members_.end(), std::size_t{0});
  build();
}

Background::Background(const Corpus& corpus, std::vector<std::size_t> members)
    : corpus_(&corpus), members_(std::move(members)) {
  for (auto m : members_) {
    if (m >= corpus.projects().size()) throw std::out_of_range("background member outside corpus");
  }
  build();
}

void Background::build() {
  const auto vocab = corpus_->vocabulary().size();
  project_count_.assign(vocab, 0);
  declaration_count_.assign(vocab, 0);

  std::vector<Eigen::Triplet<double>> cells;
  for (std::size_t row = 0; row < members_.size(); ++row) {
    const auto& project = corpus_->project(members_[row]);
    std::vector<InvocationId> seen;
    for (const auto& decl : project.declarations) {
      for (auto id : decl.invocations) cells.emplace_back(int(row), int(id.value), 1.0);
      for (auto id : decl.invocation_set()) {
        ++declaration_count_[id.value];
        seen.push_back(id);
      }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto id : seen) ++project_count_[id.value];
  }
  frequencies_.resize(Eigen::Index(members_.size()), Eigen::Index(vocab));
  frequencies_.setFromTriplets(cells.begin(), cells.end());
  frequencies_.makeCompressed();
}

std::optional<std::size_t> Background::position_of(std::string_view project_id) const {
  auto index = corpus_->find_project(project_id);
  if (!index) return std::nullopt;
  auto it = std::find(members_.begin(), members_.end(), *index);
  if (it == members_.end()) return std::nullopt;
  return std::size_t(it - members_.begin());
}

namespace {

// Call-site counts of the active project, ascending by invocation id.
std::map<std::uint32_t, double> active_frequencies(const ActiveProject& active) {
  std::map<std::uint32_t, double> f;
  for (const auto& decl : active.declarations) {
    for (auto id : decl.invocations) f[id.value] += 1.0;
  }
  return f;
}

// Project counts and graph size for "background minus anchor plus active".
struct GraphStatistics {
  double projects = 0.0;
  std::vector<std::int32_t> adjustment;  // per vocabulary entry
  std::optional<std::size_t> anchor;     // row in the background

  double idf(const Background& bg, std::uint32_t column) const {
    double a = 1.0;
    if (column < adjustment.size()) {
      a = double(std::int64_t(bg.project_count(InvocationId{column})) + adjustment[column]);
    }
    return std::log(projects / a);
  }
};

GraphStatistics graph_statistics(const Background& bg, const ActiveProject& active,
                                 const std::map<std::uint32_t, double>& active_f) {
  GraphStatistics stats;
  const auto vocab = bg.corpus().vocabulary().size();
  stats.adjustment.assign(vocab, 0);
  stats.anchor = bg.position_of(active.id);
  stats.projects = double(bg.size()) + 1.0;
  if (stats.anchor) {
    stats.projects -= 1.0;
    using RowIter = Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator;
    for (RowIter it(bg.frequencies(), Eigen::Index(*stats.anchor)); it; ++it) {
      --stats.adjustment[std::size_t(it.col())];
    }
  }
  for (const auto& [column, count] : active_f) {
    if (column < vocab) ++stats.adjustment[column];
  }
  return stats;
}

Eigen::Index feature_dimension(const Corpus& corpus, const std::map<std::uint32_t, double>& f) {
  std::size_t dim = corpus.vocabulary().size();
  if (!f.empty()) dim = std::max<std::size_t>(dim, std::size_t(f.rbegin()->first) + 1);
  return Eigen::Index(dim);
}

}  // namespace

FeatureVector project_features(const Background& background, const ActiveProject& active) {
  const auto f = active_frequencies(active);
  const auto stats = graph_statistics(background, active, f);
  FeatureVector out{active.id, Eigen::SparseVector<double>(feature_dimension(background.corpus(), f))};
  out.weights.reserve(Eigen::Index(f.size()));
  for (const auto& [column, count] : f) {
    out.weights.insertBack(Eigen::Index(column)) = count * stats.idf(background, column);
  }
  return out;
}

FeatureVector project_features(const Corpus& corpus, const Project& project) {
  const auto vocab = corpus.vocabulary().size();
  const double projects = double(corpus.projects().size());
  std::map<std::uint32_t, double> f;
  for (const auto& decl : project.declarations) {
    for (auto id : decl.invocations) f[id.value] += 1.0;
  }
  FeatureVector out{project.id, Eigen::SparseVector<double>(Eigen::Index(vocab))};
  out.weights.reserve(Eigen::Index(f.size()));
  for (const auto& [column, count] : f) {
    const double a = double(corpus.project_count(InvocationId{column}));
    out.weights.insertBack(Eigen::Index(column)) = count * std::log(projects / a);
  }
  return out;
}

NeighborSet<ProjectNeighbor> top_k_projects(const Background& background, const ActiveProject& active,
                                            std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  const auto f = active_frequencies(active);
  const auto stats = graph_statistics(background, active, f);
  const auto vocab = background.corpus().vocabulary().size();

  // Active weights, dense over the vocabulary for row lookups.
  std::vector<double> active_weight(vocab, 0.0);
  double active_norm2 = 0.0;
  for (const auto& [column, count] : f) {
    const double w = count * stats.idf(background, column);
    active_norm2 += w * w;
    if (column < vocab) active_weight[column] = w;
  }

  NeighborSet<ProjectNeighbor> out{active.id, {}};
  out.neighbors.reserve(background.size());
  const auto& freq = background.frequencies();
  using RowIter = Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator;
  for (Eigen::Index row = 0; row < freq.outerSize(); ++row) {
    if (stats.anchor && std::size_t(row) == *stats.anchor) continue;
    double dot = 0.0;
    double norm2 = 0.0;
    for (RowIter it(freq, row); it; ++it) {
      const auto column = std::uint32_t(it.col());
      const double w = it.value() * stats.idf(background, column);
      norm2 += w * w;
      if (active_weight[column] != 0.0) dot += active_weight[column] * w;
    }
    double score = 0.0;
    if (norm2 != 0.0 && active_norm2 != 0.0) score = dot / (std::sqrt(active_norm2) * std::sqrt(norm2));
    out.neighbors.push_back({background.members()[std::size_t(row)], score});
  }

  const auto& corpus = background.corpus();
  auto by_rank = [&](const ProjectNeighbor& a, const ProjectNeighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return corpus.project(a.project).id < corpus.project(b.project).id;
  };
  const auto keep = std::min(k, out.neighbors.size());
  std::partial_sort(out.neighbors.begin(), out.neighbors.begin() + std::ptrdiff_t(keep),
                    out.neighbors.end(), by_rank);
  out.neighbors.resize(keep);
  return out;
}

NeighborSet<ProjectNeighbor> top_k_projects(const Corpus& corpus, const Project& active, std::size_t k) {
  const Background background(corpus);
  return top_k_projects(background, as_active(active, active.declarations.size() - 1), k);
}

NeighborSet<DeclarationNeighbor> top_m_declarations(const Corpus& corpus,
                                                    const NeighborSet<ProjectNeighbor>& projects,
                                                    const Declaration& active, std::size_t m) {
  if (m == 0) throw std::invalid_argument("M must be positive");
  const auto query = active.invocation_set();
  NeighborSet<DeclarationNeighbor> out{active.name, {}};
  for (const auto& neighbor : projects) {
    const auto& project = corpus.project(neighbor.project);
    for (std::size_t d = 0; d < project.declarations.size(); ++d) {
      const auto set = project.declarations[d].invocation_set();
      const double score = jaccard(query, set);
      if (score > 0.0) out.neighbors.push_back({neighbor.project, d, score});
    }
  }
  auto by_rank = [&](const DeclarationNeighbor& a, const DeclarationNeighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& pa = corpus.project(a.project);
    const auto& pb = corpus.project(b.project);
    if (pa.id != pb.id) return pa.id < pb.id;
    return pa.declarations[a.declaration].name < pb.declarations[b.declaration].name;
  };
  const auto keep = std::min(m, out.neighbors.size());
  std::partial_sort(out.neighbors.begin(), out.neighbors.begin() + std::ptrdiff_t(keep),
                    out.neighbors.end(), by_rank);
  out.neighbors.resize(keep);
  return out;
}

ActiveProject as_active(const Project& project, std::size_t active_index) {
  if (active_index >= project.declarations.size()) throw std::out_of_range("active declaration index");
  return ActiveProject{project.id, project.declarations, active_index};
}

}  // namespace focus
