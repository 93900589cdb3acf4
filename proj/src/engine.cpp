#include "focus/engine.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace focus {

RatingTensor::RatingTensor(const Corpus& corpus) {
  const auto vocab = Eigen::Index(corpus.vocabulary().size());
  slices_.reserve(corpus.projects().size());
  for (const auto& project : corpus.projects()) {
    std::vector<Eigen::Triplet<double>> cells;
    for (std::size_t d = 0; d < project.declarations.size(); ++d) {
      for (auto id : project.declarations[d].invocation_set()) {
        cells.emplace_back(int(d), int(id.value), 1.0);
      }
    }
    Slice slice(Eigen::Index(project.declarations.size()), vocab);
    slice.setFromTriplets(cells.begin(), cells.end());
    slice.makeCompressed();
    nonzeros_ += std::size_t(slice.nonZeros());
    slices_.push_back(std::move(slice));
  }
}

std::span<const int> RatingTensor::row(std::size_t project, std::size_t declaration) const {
  const auto& s = slices_.at(project);
  if (Eigen::Index(declaration) >= s.rows()) throw std::out_of_range("declaration outside slice");
  const auto* outer = s.outerIndexPtr();
  return {s.innerIndexPtr() + outer[declaration], std::size_t(outer[declaration + 1] - outer[declaration])};
}

double RatingTensor::rating(std::size_t project, std::size_t declaration, InvocationId id) const {
  const auto cols = row(project, declaration);
  return std::binary_search(cols.begin(), cols.end(), int(id.value)) ? 1.0 : 0.0;
}

double mean_rating(const Declaration& d, std::size_t vocabulary_size) {
  if (vocabulary_size == 0) throw std::invalid_argument("vocabulary size must be positive");
  return double(d.invocation_set().size()) / double(vocabulary_size);
}

double combined_rating(const RatingTensor& tensor, std::size_t project, std::size_t declaration,
                       InvocationId id, const NeighborSet<ProjectNeighbor>& projects,
                       bool similarity_weighted) {
  auto it = std::find_if(projects.begin(), projects.end(),
                         [&](const ProjectNeighbor& n) { return n.project == project; });
  if (it == projects.end()) {
    throw std::invalid_argument("declaration's project is not among the neighbor projects");
  }
  // Sums over the one neighbor project that holds the declaration.
  const double weight = it->score;
  if (weight == 0.0) return 0.0;
  const double r = tensor.rating(project, declaration, id);
  return similarity_weighted ? r * weight : r;
}

std::optional<double> predict_rating(const RatingTensor& tensor, const Declaration& active, InvocationId id,
                                     const NeighborSet<DeclarationNeighbor>& declarations,
                                     const NeighborSet<ProjectNeighbor>& projects, std::size_t vocabulary_size,
                                     bool similarity_weighted) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& e : declarations) {
    const double combined = combined_rating(tensor, e.project, e.declaration, id, projects, similarity_weighted);
    const double mean_e = double(tensor.row(e.project, e.declaration).size()) / double(vocabulary_size);
    numerator += (combined - mean_e) * e.score;
    denominator += e.score;
  }
  if (denominator == 0.0) return std::nullopt;
  return mean_rating(active, vocabulary_size) + numerator / denominator;
}

namespace {

void rank_items(std::vector<RecommendationItem>& items, const Vocabulary& vocab, std::size_t n) {
  auto by_rank = [&](const RecommendationItem& a, const RecommendationItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return vocab.canonical(a.invocation) < vocab.canonical(b.invocation);
  };
  const auto keep = std::min(n, items.size());
  std::partial_sort(items.begin(), items.begin() + std::ptrdiff_t(keep), items.end(), by_rank);
  items.resize(keep);
}

std::size_t effective_vocabulary(const Corpus& corpus, const ActiveProject& active) {
  std::size_t size = corpus.vocabulary().size();
  for (const auto& decl : active.declarations) {
    for (auto id : decl.invocations) size = std::max<std::size_t>(size, std::size_t(id.value) + 1);
  }
  return size;
}

}  // namespace

RecommendationList popularity_baseline(const Background& background, std::span<const InvocationId> known,
                                       std::size_t n) {
  if (n == 0) throw std::invalid_argument("N must be positive");
  const auto& vocab = background.corpus().vocabulary();
  std::vector<bool> excluded(vocab.size(), false);
  for (auto id : known) {
    if (id.value < vocab.size()) excluded[id.value] = true;
  }
  std::uint32_t most = 0;
  for (std::uint32_t i = 0; i < vocab.size(); ++i) most = std::max(most, background.declaration_count({i}));

  RecommendationList out;
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    const auto count = background.declaration_count({i});
    if (count == 0 || excluded[i]) continue;
    out.items.push_back({InvocationId{i}, double(count) / double(most)});
  }
  rank_items(out.items, vocab, n);
  return out;
}

RecommendationList recommend_apis(const Background& background, const RatingTensor& tensor,
                                  const ActiveProject& active, const EngineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (background.size() == 0) {
    throw CorpusError(CorpusError::Kind::Empty, "background corpus contains no projects");
  }
  if (options.k == 0 || options.M == 0 || options.N == 0) {
    throw std::invalid_argument("k, M and N must be positive");
  }
  const auto& corpus = background.corpus();
  const auto& vocab = corpus.vocabulary();
  const auto& declaration = active.active_declaration();
  const auto known = declaration.invocation_set();
  const auto vocabulary_size = effective_vocabulary(corpus, active);

  auto projects = top_k_projects(background, active, options.k);
  auto declarations = top_m_declarations(corpus, projects, declaration, options.M);

  double total_similarity = 0.0;
  for (const auto& e : declarations) total_similarity += e.score;

  RecommendationList out;
  if (declarations.empty() || total_similarity == 0.0) {
    out = popularity_baseline(background, known, options.N);
    out.fallback_used = true;
  } else {
    std::vector<bool> seen(vocab.size(), false);
    for (auto id : known) {
      if (id.value < vocab.size()) seen[id.value] = true;
    }
    std::vector<InvocationId> candidates;
    for (const auto& e : declarations) {
      for (int column : tensor.row(e.project, e.declaration)) {
        if (!seen[std::size_t(column)]) {
          seen[std::size_t(column)] = true;
          candidates.push_back(InvocationId{std::uint32_t(column)});
        }
      }
    }
    out.items.reserve(candidates.size());
    for (auto id : candidates) {
      auto score = predict_rating(tensor, declaration, id, declarations, projects, vocabulary_size,
                                  options.similarity_weighted);
      out.items.push_back({id, *score});
    }
    rank_items(out.items, vocab, options.N);
  }
  out.projects = std::move(projects);
  out.declarations = std::move(declarations);
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<SnippetRecommendation> recommend_snippets(const Corpus& corpus, const RecommendationList& recs,
                                                      const Declaration& active,
                                                      const NeighborSet<ProjectNeighbor>& projects,
                                                      std::size_t query_size, std::size_t count) {
  auto query = active.invocation_set();
  for (std::size_t r = 0; r < std::min(query_size, recs.items.size()); ++r) {
    query.push_back(recs.items[r].invocation);
  }
  std::sort(query.begin(), query.end());
  query.erase(std::unique(query.begin(), query.end()), query.end());

  struct Candidate {
    std::size_t project;
    std::size_t declaration;
    double score;
  };
  std::vector<Candidate> candidates;
  for (const auto& neighbor : projects) {
    const auto& project = corpus.project(neighbor.project);
    for (std::size_t d = 0; d < project.declarations.size(); ++d) {
      const auto set = project.declarations[d].invocation_set();
      const double score = jaccard(query, set);
      if (score > 0.0) candidates.push_back({neighbor.project, d, score});
    }
  }
  auto by_rank = [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& pa = corpus.project(a.project);
    const auto& pb = corpus.project(b.project);
    if (pa.id != pb.id) return pa.id < pb.id;
    return pa.declarations[a.declaration].name < pb.declarations[b.declaration].name;
  };
  const auto keep = std::min(count, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + std::ptrdiff_t(keep), candidates.end(), by_rank);
  candidates.resize(keep);

  std::vector<SnippetRecommendation> out;
  out.reserve(keep);
  for (const auto& c : candidates) {
    const auto& project = corpus.project(c.project);
    const auto& decl = project.declarations[c.declaration];
    SnippetRecommendation snippet;
    snippet.declaration_name = decl.name;
    snippet.project_id = project.id;
    snippet.jaccard_score = c.score;
    if (decl.source_ref) {
      if (auto body = corpus.snippet(*decl.source_ref)) snippet.body = std::string(*body);
    }
    for (auto id : decl.invocations) snippet.invocation_sequence.push_back(corpus.vocabulary().canonical(id));
    out.push_back(std::move(snippet));
  }
  return out;
}

Engine::Engine(Corpus corpus) : corpus_(std::move(corpus)), background_(corpus_), tensor_(corpus_) {}

}  // namespace focus
