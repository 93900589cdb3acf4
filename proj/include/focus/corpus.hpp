#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace focus {

// Dense index into a corpus vocabulary.
struct InvocationId {
  std::uint32_t value = 0;

  friend auto operator<=>(InvocationId, InvocationId) = default;
};

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { Parse, Duplicate, Empty, Io };

  CorpusError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Bijection between canonical invocation strings and dense ids, in
// first-appearance order.
class Vocabulary {
 public:
  InvocationId intern(std::string_view canonical);
  std::optional<InvocationId> find(std::string_view canonical) const;
  const std::string& canonical(InvocationId id) const { return canonical_.at(id.value); }
  std::size_t size() const noexcept { return canonical_.size(); }

 private:
  std::vector<std::string> canonical_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Declaration {
  std::string name;
  std::vector<std::string> param_types;
  // Source order, repeats kept.
  std::vector<InvocationId> invocations;
  std::optional<std::string> source_ref;

  // Sorted, de-duplicated view of `invocations`.
  std::vector<InvocationId> invocation_set() const;
};

struct Project {
  std::string id;
  std::optional<std::string> category;
  std::vector<Declaration> declarations;
};

using SnippetMap = std::map<std::string, std::string, std::less<>>;

class Corpus {
 public:
  // Validates the invariants (non-empty, unique ids and declaration names,
  // every vocabulary entry used) and precomputes frequencies.
  Corpus(std::vector<Project> projects, Vocabulary vocabulary, SnippetMap snippets = {});

  std::span<const Project> projects() const noexcept { return projects_; }
  const Project& project(std::size_t index) const { return projects_.at(index); }
  std::optional<std::size_t> find_project(std::string_view id) const;

  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  const SnippetMap& snippets() const noexcept { return snippets_; }
  std::optional<std::string_view> snippet(std::string_view source_ref) const;

  // Number of projects / declarations containing the invocation.
  std::uint32_t project_count(InvocationId id) const { return project_count_.at(id.value); }
  std::uint32_t declaration_count(InvocationId id) const { return declaration_count_.at(id.value); }

  std::size_t declaration_total() const noexcept { return declaration_total_; }

  Corpus with_snippets(SnippetMap snippets) const&;

 private:
  std::vector<Project> projects_;
  Vocabulary vocabulary_;
  SnippetMap snippets_;
  std::unordered_map<std::string, std::size_t> project_index_;
  std::vector<std::uint32_t> project_count_;
  std::vector<std::uint32_t> declaration_count_;
  std::size_t declaration_total_ = 0;
};

inline constexpr std::string_view kFactsFormat = "focus-facts";
inline constexpr std::string_view kSnippetsFormat = "focus-snippets";
inline constexpr int kFormatVersion = 1;

Corpus parse_facts(std::istream& in);
SnippetMap load_snippets(std::istream& in);

// Writes the FACTS format; parse_facts(write_facts(c)) reproduces c.
void write_facts(std::ostream& out, const Corpus& corpus);
void write_snippets(std::ostream& out, const SnippetMap& snippets);

// Opens and parses files; failures surface as CorpusError::Kind::Io.
Corpus load_corpus(const std::string& facts_path, const std::optional<std::string>& snippets_path);

}  // namespace focus
