#include "focus/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace focus {

using nlohmann::json;

InvocationId Vocabulary::intern(std::string_view canonical) {
  if (canonical.empty()) {
    throw CorpusError(CorpusError::Kind::Parse, "empty invocation string");
  }
  auto [it, inserted] = index_.try_emplace(std::string(canonical),
                                           static_cast<std::uint32_t>(canonical_.size()));
  if (inserted) canonical_.emplace_back(canonical);
  return InvocationId{it->second};
}

std::optional<InvocationId> Vocabulary::find(std::string_view canonical) const {
  auto it = index_.find(std::string(canonical));
  if (it == index_.end()) return std::nullopt;
  return InvocationId{it->second};
}

std::vector<InvocationId> Declaration::invocation_set() const {
  std::vector<InvocationId> set(invocations);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

Corpus::Corpus(std::vector<Project> projects, Vocabulary vocabulary, SnippetMap snippets)
    : projects_(std::move(projects)),
      vocabulary_(std::move(vocabulary)),
      snippets_(std::move(snippets)) {
  if (projects_.empty()) {
    throw CorpusError(CorpusError::Kind::Empty, "corpus contains no projects");
  }
  const auto vocab = vocabulary_.size();
  project_count_.assign(vocab, 0);
  declaration_count_.assign(vocab, 0);

  std::vector<std::uint32_t> last_project(vocab, UINT32_MAX);
  for (std::size_t p = 0; p < projects_.size(); ++p) {
    const auto& project = projects_[p];
    if (project.id.empty()) {
      throw CorpusError(CorpusError::Kind::Parse, "project with empty id");
    }
    if (!project_index_.emplace(project.id, p).second) {
      throw CorpusError(CorpusError::Kind::Duplicate, "duplicate project '" + project.id + "'");
    }
    if (project.declarations.empty()) {
      throw CorpusError(CorpusError::Kind::Parse, "project '" + project.id + "' has no declarations");
    }
    std::unordered_set<std::string_view> names;
    for (const auto& decl : project.declarations) {
      if (decl.name.empty()) {
        throw CorpusError(CorpusError::Kind::Parse, "empty declaration name in '" + project.id + "'");
      }
      if (!names.insert(decl.name).second) {
        throw CorpusError(CorpusError::Kind::Duplicate,
                          "duplicate declaration '" + decl.name + "' in project '" + project.id + "'");
      }
      ++declaration_total_;
      for (auto id : decl.invocation_set()) {
        if (id.value >= vocab) {
          throw CorpusError(CorpusError::Kind::Parse, "invocation id outside vocabulary");
        }
        ++declaration_count_[id.value];
        if (last_project[id.value] != p) {
          last_project[id.value] = static_cast<std::uint32_t>(p);
          ++project_count_[id.value];
        }
      }
    }
  }
  for (std::size_t i = 0; i < vocab; ++i) {
    if (project_count_[i] == 0) {
      throw CorpusError(CorpusError::Kind::Parse,
                        "vocabulary entry '" + vocabulary_.canonical(InvocationId{static_cast<std::uint32_t>(i)}) +
                            "' is never invoked");
    }
  }
}

std::optional<std::size_t> Corpus::find_project(std::string_view id) const {
  auto it = project_index_.find(std::string(id));
  if (it == project_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string_view> Corpus::snippet(std::string_view source_ref) const {
  auto it = snippets_.find(source_ref);
  if (it == snippets_.end()) return std::nullopt;
  return std::string_view(it->second);
}

Corpus Corpus::with_snippets(SnippetMap snippets) const& {
  return Corpus(projects_, vocabulary_, std::move(snippets));
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& message) {
  throw CorpusError(CorpusError::Kind::Parse, "line " + std::to_string(line) + ": " + message);
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

void check_header(const std::string& line, std::size_t line_no, std::string_view format) {
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    parse_error(line_no, std::string("invalid JSON header: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != format) {
    parse_error(line_no, "expected header {\"format\": \"" + std::string(format) + "\", \"version\": 1}");
  }
  if (!header.contains("version") || header["version"] != kFormatVersion) {
    parse_error(line_no, "unsupported " + std::string(format) + " version");
  }
}

std::string required_string(const json& record, const char* key, std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    parse_error(line_no, std::string("missing or non-string field '") + key + "'");
  }
  auto value = it->get<std::string>();
  if (value.empty()) parse_error(line_no, std::string("empty field '") + key + "'");
  return value;
}

std::optional<std::string> optional_string(const json& record, const char* key, std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) parse_error(line_no, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& record, const char* key, std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_array()) parse_error(line_no, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& item : *it) {
    if (!item.is_string()) parse_error(line_no, std::string("field '") + key + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

Corpus parse_facts(std::istream& in) {
  std::vector<Project> projects;
  Vocabulary vocabulary;
  std::unordered_map<std::string, std::size_t> seen_projects;
  std::unordered_set<std::string> names_in_current;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (!header_seen) {
      check_header(line, line_no, kFactsFormat);
      header_seen = true;
      continue;
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) parse_error(line_no, "record must be a JSON object");

    auto project_id = required_string(record, "project", line_no);
    auto category = optional_string(record, "category", line_no);

    if (projects.empty() || projects.back().id != project_id) {
      if (seen_projects.contains(project_id)) {
        throw CorpusError(CorpusError::Kind::Duplicate,
                          "line " + std::to_string(line_no) + ": records for project '" + project_id +
                              "' are not contiguous");
      }
      seen_projects.emplace(project_id, projects.size());
      projects.push_back(Project{project_id, category, {}});
      names_in_current.clear();
    } else if (category && projects.back().category != category) {
      if (projects.back().category) {
        parse_error(line_no, "conflicting category for project '" + project_id + "'");
      }
      projects.back().category = category;
    }

    Declaration decl;
    decl.name = required_string(record, "declaration", line_no);
    if (!names_in_current.insert(decl.name).second) {
      throw CorpusError(CorpusError::Kind::Duplicate, "line " + std::to_string(line_no) +
                                                          ": duplicate declaration '" + decl.name +
                                                          "' in project '" + project_id + "'");
    }
    decl.param_types = string_list(record, "params", line_no);
    for (const auto& canonical : string_list(record, "invocations", line_no)) {
      if (canonical.empty()) parse_error(line_no, "empty invocation string");
      decl.invocations.push_back(vocabulary.intern(canonical));
    }
    decl.source_ref = optional_string(record, "source_ref", line_no);
    projects.back().declarations.push_back(std::move(decl));
  }
  if (in.bad()) throw CorpusError(CorpusError::Kind::Io, "read error while parsing facts");
  if (projects.empty()) {
    throw CorpusError(CorpusError::Kind::Empty, header_seen ? "facts stream has no records"
                                                            : "facts stream is empty");
  }
  return Corpus(std::move(projects), std::move(vocabulary));
}

SnippetMap load_snippets(std::istream& in) {
  SnippetMap snippets;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (!header_seen) {
      check_header(line, line_no, kSnippetsFormat);
      header_seen = true;
      continue;
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) parse_error(line_no, "record must be a JSON object");
    auto key = required_string(record, "key", line_no);
    auto body_it = record.find("body");
    if (body_it == record.end() || !body_it->is_string()) {
      parse_error(line_no, "missing or non-string field 'body'");
    }
    if (!snippets.emplace(key, body_it->get<std::string>()).second) {
      throw CorpusError(CorpusError::Kind::Duplicate,
                        "line " + std::to_string(line_no) + ": duplicate snippet key '" + key + "'");
    }
  }
  if (in.bad()) throw CorpusError(CorpusError::Kind::Io, "read error while parsing snippets");
  return snippets;
}

void write_facts(std::ostream& out, const Corpus& corpus) {
  out << json{{"format", kFactsFormat}, {"version", kFormatVersion}}.dump() << '\n';
  const auto& vocab = corpus.vocabulary();
  for (const auto& project : corpus.projects()) {
    for (const auto& decl : project.declarations) {
      json record;
      record["project"] = project.id;
      if (project.category) record["category"] = *project.category;
      record["declaration"] = decl.name;
      record["params"] = decl.param_types;
      auto& calls = record["invocations"] = json::array();
      for (auto id : decl.invocations) calls.push_back(vocab.canonical(id));
      if (decl.source_ref) record["source_ref"] = *decl.source_ref;
      out << record.dump() << '\n';
    }
  }
}

void write_snippets(std::ostream& out, const SnippetMap& snippets) {
  out << json{{"format", kSnippetsFormat}, {"version", kFormatVersion}}.dump() << '\n';
  for (const auto& [key, body] : snippets) {
    out << json{{"key", key}, {"body", body}}.dump() << '\n';
  }
}

Corpus load_corpus(const std::string& facts_path, const std::optional<std::string>& snippets_path) {
  std::ifstream facts(facts_path, std::ios::binary);
  if (!facts) throw CorpusError(CorpusError::Kind::Io, "cannot open facts file '" + facts_path + "'");
  auto corpus = parse_facts(facts);
  if (!snippets_path) return corpus;
  std::ifstream snippets(*snippets_path, std::ios::binary);
  if (!snippets) {
    throw CorpusError(CorpusError::Kind::Io, "cannot open snippets file '" + *snippets_path + "'");
  }
  return corpus.with_snippets(load_snippets(snippets));
}

}  // namespace focus
