#pragma once

// Reloadable knowledge-base snapshot: graph options, relation synonym lexicon
// and the triple set in one versioned line-record file.
//
//   xqa-store 1
//   label-predicate <IRI>
//   alt-label-predicate <IRI>          (zero or more)
//   synonyms <N>
//   <surface>\t<IRI>                   (N lines, sorted, unique)
//   triples <M>
//   <N-Triples statement>              (M lines, canonical order)
//   end
//
// Writing a loaded snapshot reproduces the input bytes exactly.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xqa/graph.hpp"

namespace xqa {

struct SynonymEntry {
  std::string surface;  // normalized
  Iri predicate;

  auto operator<=>(const SynonymEntry&) const = default;
};

/// Parses a relation synonym lexicon: `surface<TAB>predicate-IRI` per line,
/// `#` comments and blank lines ignored. The IRI may be bare or in angle
/// brackets.
inline std::vector<SynonymEntry> parse_synonyms(std::string_view text) {
  std::vector<SynonymEntry> out;
  detail::for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') return;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line_no, "synonym line needs a TAB between surface form and IRI");
    auto surface = normalize_surface_form(line.substr(0, tab));
    auto iri_text = detail::trim(line.substr(tab + 1));
    if (surface.empty()) throw ParseError(line_no, "empty surface form");
    Iri iri;
    if (!iri_text.empty() && iri_text.front() == '<') {
      detail::Cursor cur(iri_text, line_no);
      iri = cur.read_iriref();
      if (!cur.done()) cur.fail("trailing content after IRI");
    } else {
      if (iri_text.empty() || iri_text.find_first_of(" \t<>\"") != std::string_view::npos)
        throw ParseError(line_no, "malformed predicate IRI");
      iri = Iri(std::string(iri_text));
    }
    out.push_back({std::move(surface), std::move(iri)});
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Store {
  Graph graph;
  std::vector<SynonymEntry> synonyms;
};

inline constexpr std::string_view kStoreMagic = "xqa-store 1";

inline std::string serialize_store(const Store& store) {
  std::ostringstream out;
  out << kStoreMagic << '\n';
  const auto& opts = store.graph.options();
  out << "label-predicate " << to_ntriples(opts.label_predicate) << '\n';
  for (const auto& p : opts.alt_label_predicates)
    out << "alt-label-predicate " << to_ntriples(p) << '\n';
  auto synonyms = store.synonyms;
  std::sort(synonyms.begin(), synonyms.end());
  synonyms.erase(std::unique(synonyms.begin(), synonyms.end()), synonyms.end());
  out << "synonyms " << synonyms.size() << '\n';
  for (const auto& s : synonyms) out << s.surface << '\t' << to_ntriples(s.predicate) << '\n';
  out << "triples " << store.graph.size() << '\n';
  out << serialize_ntriples(store.graph);
  out << "end\n";
  return out.str();
}

inline bool is_store_snapshot(std::string_view text) {
  return text.substr(0, kStoreMagic.size()) == kStoreMagic &&
         (text.size() == kStoreMagic.size() || text[kStoreMagic.size()] == '\n');
}

inline Store parse_store(std::string_view text) {
  std::vector<std::string_view> lines;
  detail::for_each_line(text, [&](std::string_view l, std::size_t) { lines.push_back(l); });
  std::size_t i = 0;
  auto next = [&]() -> std::string_view {
    if (i >= lines.size()) throw ParseError(i + 1, "unexpected end of snapshot");
    return lines[i++];
  };
  auto iri_after = [&](std::string_view line, std::string_view key) {
    detail::Cursor cur(line.substr(key.size()), i);
    cur.skip_ws();
    return cur.read_iriref();
  };
  auto count_after = [&](std::string_view line, std::string_view key) {
    if (line.substr(0, key.size()) != key) throw ParseError(i, "expected '" + std::string(key) + "'");
    try {
      return static_cast<std::size_t>(std::stoull(std::string(line.substr(key.size()))));
    } catch (const std::exception&) {
      throw ParseError(i, "malformed count");
    }
  };

  if (next() != kStoreMagic) throw ParseError(1, "not an xqa-store v1 snapshot");
  GraphOptions opts;
  auto line = next();
  if (line.substr(0, 16) != "label-predicate ") throw ParseError(i, "expected label-predicate");
  opts.label_predicate = iri_after(line, "label-predicate ");
  opts.alt_label_predicates.clear();
  line = next();
  while (line.substr(0, 20) == "alt-label-predicate ") {
    opts.alt_label_predicates.push_back(iri_after(line, "alt-label-predicate "));
    line = next();
  }
  Store store{Graph(opts), {}};
  std::size_t n_syn = count_after(line, "synonyms ");
  std::string syn_text;
  for (std::size_t k = 0; k < n_syn; ++k) {
    syn_text += next();
    syn_text += '\n';
  }
  store.synonyms = parse_synonyms(syn_text);
  std::size_t n_triples = count_after(next(), "triples ");
  for (std::size_t k = 0; k < n_triples; ++k) {
    auto l = next();
    store.graph.insert(detail::parse_ntriples_line(l, i));
  }
  if (next() != "end") throw ParseError(i, "expected 'end'");
  if (store.graph.size() != n_triples) throw ParseError(i, "duplicate triples in snapshot");
  return store;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path);
}

/// Loads either a snapshot or a plain N-Triples file. A lexicon file, when
/// given, is merged into the synonyms.
inline Store load_store(const std::string& kg_path, const std::string& lexicon_path = {}) {
  auto text = read_file(kg_path);
  Store store = is_store_snapshot(text) ? parse_store(text) : Store{load_ntriples(text), {}};
  if (!lexicon_path.empty()) {
    auto extra = parse_synonyms(read_file(lexicon_path));
    store.synonyms.insert(store.synonyms.end(), extra.begin(), extra.end());
    std::sort(store.synonyms.begin(), store.synonyms.end());
    store.synonyms.erase(std::unique(store.synonyms.begin(), store.synonyms.end()),
                         store.synonyms.end());
  }
  return store;
}

}  // namespace xqa
