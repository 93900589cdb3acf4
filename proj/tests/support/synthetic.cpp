#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace focus::testing {

namespace {

std::string pad(std::size_t n, int width) {
  auto s = std::to_string(n);
  return std::string(std::size_t(std::max(0, width - int(s.size()))), '0') + s;
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

Corpus generate_corpus(const SyntheticOptions& o) {
  std::mt19937_64 rng(o.seed);
  Vocabulary vocab;

  auto family_call = [&](std::size_t family, std::size_t j) {
    return "com/lib" + pad(family, 2) + "/Type" + pad(j / 8, 3) + "/call" + pad(j % 8, 1) + "()";
  };
  auto common_call = [&](std::size_t j) { return "java/util/Common" + pad(j, 4) + "/use()"; };

  // Zipf over the common pool.
  std::vector<double> zipf(o.common_pool);
  for (std::size_t j = 0; j < o.common_pool; ++j) zipf[j] = 1.0 / double(j + 1);
  std::discrete_distribution<std::size_t> popular(zipf.begin(), zipf.end());

  std::vector<std::vector<std::vector<std::string>>> patterns(o.families);
  for (std::size_t f = 0; f < o.families; ++f) {
    for (std::size_t p = 0; p < o.patterns_per_family; ++p) {
      std::vector<std::string> pattern;
      const auto len = uniform(rng, o.min_pattern, o.max_pattern);
      for (std::size_t c = 0; c < len; ++c) pattern.push_back(family_call(f, uniform(rng, 0, o.family_pool - 1)));
      patterns[f].push_back(std::move(pattern));
    }
  }

  // Uneven family sizes so categories differ in cardinality.
  std::vector<double> family_weight(o.families);
  for (std::size_t f = 0; f < o.families; ++f) family_weight[f] = 1.0 / std::sqrt(double(f + 1));
  std::discrete_distribution<std::size_t> pick_family(family_weight.begin(), family_weight.end());

  std::vector<Project> projects;
  for (std::size_t p = 0; p < o.projects; ++p) {
    const auto family = pick_family(rng);
    Project project;
    project.id = "p" + pad(p, 4);
    project.category = "category-" + pad(family, 2);
    const auto decls = uniform(rng, o.min_declarations, o.max_declarations);
    for (std::size_t d = 0; d < decls; ++d) {
      Declaration decl;
      decl.name = project.id + ".Main.method" + pad(d, 3) + "()";
      const auto& pattern = patterns[family][uniform(rng, 0, o.patterns_per_family - 1)];
      for (const auto& call : pattern) {
        if (uniform(rng, 0, 9) < 2) continue;  // drop
        decl.invocations.push_back(vocab.intern(call));
        if (uniform(rng, 0, 9) < 2) decl.invocations.push_back(vocab.intern(common_call(popular(rng))));
      }
      if (decl.invocations.empty()) decl.invocations.push_back(vocab.intern(pattern.front()));
      decl.source_ref = decl.name;
      project.declarations.push_back(std::move(decl));
    }
    projects.push_back(std::move(project));
  }
  return Corpus(std::move(projects), std::move(vocab));
}

Corpus generate_planted_clones(std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vocabulary vocab;
  std::vector<Project> projects;
  for (std::size_t pair = 0; pair < pairs; ++pair) {
    Project base;
    base.id = "pair" + pad(pair, 4) + "-a";
    base.category = "category-" + pad(pair % 3, 1);
    std::size_t next = 0;
    const auto decls = uniform(rng, 2, 8);
    for (std::size_t d = 0; d < decls; ++d) {
      Declaration decl;
      decl.name = "Main.m" + pad(d, 2) + "()";
      const auto calls = uniform(rng, 2, 7);
      for (std::size_t c = 0; c < calls; ++c) {
        decl.invocations.push_back(vocab.intern("pair" + pad(pair, 4) + "/Api/call" + pad(next++, 3) + "()"));
      }
      base.declarations.push_back(std::move(decl));
    }
    Project twin = base;
    twin.id = "pair" + pad(pair, 4) + "-b";
    twin.declarations.front().invocations.push_back(vocab.intern("pair" + pad(pair, 4) + "/Api/extra()"));
    projects.push_back(std::move(base));
    projects.push_back(std::move(twin));
  }
  return Corpus(std::move(projects), std::move(vocab));
}

Corpus generate_random_corpus(std::uint64_t seed, std::size_t max_projects, std::size_t max_declarations,
                              std::size_t max_vocabulary) {
  std::mt19937_64 rng(seed);
  const auto project_count = uniform(rng, 2, max_projects);
  const auto vocab_size = uniform(rng, 1, max_vocabulary);
  Vocabulary vocab;
  std::vector<Project> projects;
  for (std::size_t p = 0; p < project_count; ++p) {
    Project project;
    project.id = "q" + pad(uniform(rng, 0, 999), 3) + "-" + pad(p, 2);
    const auto decls = uniform(rng, 1, max_declarations);
    for (std::size_t d = 0; d < decls; ++d) {
      Declaration decl;
      decl.name = "m" + pad(d, 2);
      const auto calls = uniform(rng, 0, 8);
      for (std::size_t c = 0; c < calls; ++c) {
        decl.invocations.push_back(vocab.intern("api/c" + pad(uniform(rng, 0, vocab_size - 1), 2)));
      }
      project.declarations.push_back(std::move(decl));
    }
    projects.push_back(std::move(project));
  }
  if (vocab.size() == 0) projects.front().declarations.front().invocations.push_back(vocab.intern("api/c00"));
  return Corpus(std::move(projects), std::move(vocab));
}

std::string to_facts(const Corpus& corpus) {
  std::ostringstream out;
  write_facts(out, corpus);
  return out.str();
}

}  // namespace focus::testing
