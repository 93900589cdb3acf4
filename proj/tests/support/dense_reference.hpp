#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "focus/corpus.hpp"
#include "focus/similarity.hpp"

namespace focus::testing {

// Brute-force recommender over dense matrices, written from the formulas
// rather than from the library code. Used as an oracle.
struct DenseResult {
  struct Neighbor {
    std::size_t project = 0;
    double score = 0.0;
  };
  struct DeclNeighbor {
    std::size_t project = 0;
    std::size_t declaration = 0;
    double score = 0.0;
  };
  struct Item {
    std::uint32_t invocation = 0;
    double score = 0.0;
  };
  std::vector<Neighbor> projects;
  std::vector<DeclNeighbor> declarations;
  std::vector<Item> items;
  bool fallback = false;
};

DenseResult dense_recommend(const Corpus& corpus, std::span<const std::size_t> members,
                            const ActiveProject& active, std::size_t k, std::size_t M, std::size_t N);

}  // namespace focus::testing
