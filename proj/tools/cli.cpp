#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nckg/construct.hpp"
#include "nckg/eval.hpp"
#include "nckg/io.hpp"
#include "nckg/lexical_index.hpp"
#include "nckg/query.hpp"
#include "nckg/review.hpp"
#include "nckg/turtle.hpp"
#include "nckg/vocab.hpp"

namespace nckg::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

void apply_backend(GatewayConfig& cfg, std::string_view spec) {
  if (spec == "http") {
    cfg.backend = BackendKind::Http;
  } else if (spec == "mock") {
    cfg.backend = BackendKind::Mock;
  } else if (spec.rfind("mock:", 0) == 0) {
    cfg.backend = BackendKind::Mock;
    cfg.mock_script = std::string(spec.substr(5));
  } else {
    throw ConfigError("unknown backend '" + std::string(spec) + "', expected http or mock:<script>");
  }
}

AppConfig load_config(const fs::path& path) {
  AppConfig c;
  const auto base = path.parent_path();
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    if (j.contains("store_path")) c.store_path = resolve(base, j["store_path"].get<std::string>());
    if (j.contains("ontology_path")) c.ontology_path = resolve(base, j["ontology_path"].get<std::string>());
    if (j.contains("output_dir")) c.output_dir = resolve(base, j["output_dir"].get<std::string>());
    if (j.contains("top_k")) c.top_k = j["top_k"].get<std::size_t>();
    if (j.contains("max_depth")) c.max_depth = j["max_depth"].get<std::size_t>();
    if (j.contains("gateway")) {
      const auto& g = j["gateway"];
      auto& gc = c.gateway;
      if (g.contains("api_key")) {
        throw ConfigError(path.string() + ": keys are read from the environment only; set api_key_env instead");
      }
      if (g.contains("endpoint")) gc.endpoint = g["endpoint"].get<std::string>();
      if (g.contains("api_key_env")) gc.api_key_env = g["api_key_env"].get<std::string>();
      if (g.contains("model")) gc.model = g["model"].get<std::string>();
      if (g.contains("timeout_s")) gc.timeout_s = g["timeout_s"].get<double>();
      if (g.contains("max_retries")) gc.max_retries = g["max_retries"].get<int>();
      if (g.contains("max_in_flight")) gc.max_in_flight = g["max_in_flight"].get<std::size_t>();
      if (g.contains("retry_base_ms")) gc.retry_base = std::chrono::milliseconds(g["retry_base_ms"].get<long>());
      if (g.contains("backend")) apply_backend(gc, g["backend"].get<std::string>());
      if (g.contains("mock_script")) gc.mock_script = resolve(base, g["mock_script"].get<std::string>());
      if (!gc.mock_script.empty()) gc.mock_script = resolve(base, gc.mock_script.string());
      if (g.contains("prompt_dir")) gc.prompt_dir = resolve(base, g["prompt_dir"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return c;
}

namespace {

Document parse_file(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw Error(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                e.message() + (e.snippet().empty() ? "" : "\n  " + e.snippet()));
  }
}

PrefixMap default_prefixes() {
  return {{"ckg", std::string(vocab::kCkg)}, {"rdf", std::string(vocab::kRdf)}, {"rdfs", std::string(vocab::kRdfs)}};
}

GraphStore load_store(const AppConfig& c) {
  GraphStore store(c.max_depth);
  store.prefixes() = default_prefixes();
  if (!fs::exists(c.store_path)) return store;
  const auto doc = parse_file(c.store_path);
  for (const auto& [p, ns] : doc.prefixes) store.prefixes()[p] = ns;
  for (const auto& t : doc.triples) store.insert(t);
  return store;
}

void save_store(const GraphStore& store, const fs::path& path) {
  write_file_atomic(path, serialize(Document{store.prefixes(), store.triples()}));
}

OntologyModel load_ontology(const AppConfig& c) {
  if (c.ontology_path.empty()) return OntologyModel::load_default();
  return OntologyModel::load(parse_file(c.ontology_path));
}

void print_stats(std::ostream& out, const StoreStats& s) {
  out << "| Triples | Nested triples | Entities | Events |\n";
  out << "|---:|---:|---:|---:|\n";
  out << "| " << s.triples << " | " << s.nested << " | " << s.entities << " | " << s.events << " |\n";
}

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

ojson bundle_to_json(const RetrievalBundle& b, const PrefixMap& prefixes) {
  ojson j;
  j["clause_id"] = b.clause_id;
  j["extracted_terms"] = b.extracted_terms;
  auto matches = [](const std::vector<std::vector<Match>>& per_term) {
    ojson arr = ojson::array();
    for (const auto& list : per_term) {
      ojson inner = ojson::array();
      for (const auto& m : list) {
        ojson e;
        e["id"] = m.id;
        e["score"] = m.score;
        inner.push_back(std::move(e));
      }
      arr.push_back(std::move(inner));
    }
    return arr;
  };
  j["entity_matches"] = matches(b.entity_matches);
  j["event_matches"] = matches(b.event_matches);
  j["retrieved_triples"] = ojson::array();
  for (const auto& t : b.retrieved_triples) j["retrieved_triples"].push_back(triple_to_string(t, prefixes));
  j["retrieved_risk_categories"] = ojson::array();
  for (auto c : b.retrieved_risk_categories) j["retrieved_risk_categories"].push_back(std::string(to_string(c)));
  return j;
}

struct Options {
  std::string config;
  std::string store;
  std::string ontology;
  std::string backend;
  std::string format = "tsv";
  std::string output_dir;
  std::size_t top_k = 0;
  std::size_t max_depth = 0;
  std::size_t max_in_flight = 0;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Getenv& getenv) {
  CLI::App app{"Nested contract knowledge graph: build, query and review", "nckg"};
  app.fallthrough();
  app.require_subcommand(1);

  Options o;
  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--store", o.store, "Store file (.ttls)");
  app.add_option("--ontology", o.ontology, "Ontology file (.ttls); built-in when omitted");
  app.add_option("--backend", o.backend, "http or mock:<script.json>");
  app.add_option("--top-k", o.top_k, "Matches per term")->check(CLI::PositiveNumber);
  app.add_option("--max-depth", o.max_depth, "Maximum triple nesting depth")->check(CLI::PositiveNumber);
  app.add_option("--max-in-flight", o.max_in_flight, "Concurrent model calls")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Row output format")->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("-o,--output-dir", o.output_dir, "Directory for generated files");

  auto* import_cmd = app.add_subcommand("import", "Merge .ttls files into the store");
  std::vector<std::string> import_files;
  import_cmd->add_option("files", import_files, "Turtle-star files")->required();

  auto* stats_cmd = app.add_subcommand("stats", "Print store statistics");

  auto* query_cmd = app.add_subcommand("query", "Run a SELECT query against the store");
  std::string query_text, query_file;
  query_cmd->add_option("query", query_text, "Inline query text");
  query_cmd->add_option("-f,--file", query_file, "Query file");

  auto* map_cmd = app.add_subcommand("map", "Match terms to store entities and events");
  std::vector<std::string> map_terms;
  map_cmd->add_option("terms", map_terms, "Terms to match")->required();

  auto* extract_cmd = app.add_subcommand("extract", "Extract clauses into staging files");
  std::string extract_corpus;
  std::vector<std::string> extract_ids;
  extract_cmd->add_option("clauses", extract_corpus, "Clause JSONL")->required();
  extract_cmd->add_option("--id", extract_ids, "Only these clause ids");

  auto* commit_cmd = app.add_subcommand("commit", "Commit approved staging files into the store");
  std::vector<std::string> commit_files;
  bool skip_unapproved = false;
  commit_cmd->add_option("files", commit_files, "Staging files")->required();
  commit_cmd->add_flag("--skip-unapproved", skip_unapproved, "Skip pending or rejected files instead of failing");

  auto* ingest_cmd = app.add_subcommand("ingest", "Extract a whole corpus into staging files");
  std::string ingest_corpus_path;
  std::size_t ingest_workers = 0;
  ingest_cmd->add_option("clauses", ingest_corpus_path, "Clause JSONL")->required();
  ingest_cmd->add_option("--workers", ingest_workers, "Parallel extractions");

  auto* review_cmd = app.add_subcommand("review", "Review clauses for risk");
  std::string review_corpus, review_mode = "nckg", review_catalog;
  review_cmd->add_option("clauses", review_corpus, "Clause JSONL")->required();
  review_cmd->add_option("--mode", review_mode, "nckg, vector or llm-only")
      ->check(CLI::IsMember({"nckg", "vector", "llm-only"}));
  review_cmd->add_option("--catalog", review_catalog, "Standard provisions JSONL for the vector mode");

  auto* eval_cmd = app.add_subcommand("eval", "Score verdicts against gold annotations");
  std::string eval_gold, eval_verdicts, eval_rs;
  eval_cmd->add_option("gold", eval_gold, "Gold JSONL")->required();
  eval_cmd->add_option("verdicts", eval_verdicts, "Verdict JSONL")->required();
  eval_cmd->add_option("--rs", eval_rs, "Human summary scores JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; anything else is a usage error.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    AppConfig cfg = o.config.empty() ? AppConfig{} : load_config(o.config);
    if (!o.store.empty()) cfg.store_path = o.store;
    if (!o.ontology.empty()) cfg.ontology_path = o.ontology;
    if (!o.backend.empty()) apply_backend(cfg.gateway, o.backend);
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    if (o.top_k != 0) cfg.top_k = o.top_k;
    if (o.max_depth != 0) cfg.max_depth = o.max_depth;
    if (o.max_in_flight != 0) cfg.gateway.max_in_flight = o.max_in_flight;
    if (cfg.top_k == 0) throw ConfigError("top_k must be at least 1");

    auto make_gateway = [&] {
      if (cfg.gateway.backend == BackendKind::Mock && cfg.gateway.mock_script.empty()) {
        throw ConfigError("the mock backend needs a script: --backend mock:<script.json>");
      }
      return Gateway::from_config(cfg.gateway, getenv);
    };

    if (*import_cmd) {
      GraphStore store = load_store(cfg);
      std::vector<Document> docs;
      for (const auto& f : import_files) docs.push_back(parse_file(f));
      for (const auto& d : docs) {
        for (const auto& t : d.triples) store.check_insertable(t);
      }
      for (const auto& d : docs) {
        for (const auto& [p, ns] : d.prefixes) store.prefixes()[p] = ns;
        for (const auto& t : d.triples) store.insert(t);
      }
      save_store(store, cfg.store_path);
      print_stats(out, store.stats());
      return 0;
    }

    if (*stats_cmd) {
      print_stats(out, load_store(cfg).stats());
      return 0;
    }

    if (*query_cmd) {
      if (query_text.empty() == query_file.empty()) throw ConfigError("give either an inline query or --file");
      const std::string text = query_file.empty() ? query_text : read_file(query_file);
      const auto q = parse_query(text);
      const GraphStore store = load_store(cfg);
      const auto table = evaluate(store, q);
      PrefixMap prefixes = store.prefixes();
      for (const auto& [p, ns] : q.prefixes) prefixes[p] = ns;
      out << (o.format == "json" ? to_json_rows(table, prefixes) : to_tsv(table, prefixes));
      return 0;
    }

    if (*map_cmd) {
      const GraphStore store = load_store(cfg);
      const auto onto = load_ontology(cfg);
      const auto index = build_index(store, onto);
      if (o.format != "json") out << "term\tkind\trank\tscore\tid\n";
      for (const auto& term : map_terms) {
        for (auto kind : {DocKind::Entity, DocKind::Event}) {
          const auto matches = index.top_k(term, cfg.top_k, kind);
          for (std::size_t r = 0; r < matches.size(); ++r) {
            const auto& m = matches[r];
            const auto label = index.docs()[m.doc].term ? term_to_string(*index.docs()[m.doc].term, store.prefixes())
                                                        : m.id;
            if (o.format == "json") {
              ojson j;
              j["term"] = term;
              j["kind"] = std::string(to_string(kind));
              j["rank"] = r + 1;
              j["score"] = m.score;
              j["id"] = label;
              out << j.dump() << "\n";
            } else {
              out << term << "\t" << to_string(kind) << "\t" << r + 1 << "\t" << fmt(m.score, 6) << "\t" << label
                  << "\n";
            }
          }
        }
      }
      return 0;
    }

    if (*extract_cmd) {
      auto gw = make_gateway();
      const auto onto = load_ontology(cfg);
      auto clauses = read_clauses(read_file(extract_corpus));
      if (!extract_ids.empty()) {
        const std::set<std::string> want(extract_ids.begin(), extract_ids.end());
        std::erase_if(clauses, [&](const Clause& c) { return !want.contains(c.id); });
        for (const auto& id : want) {
          if (std::none_of(clauses.begin(), clauses.end(), [&](const Clause& c) { return c.id == id; })) {
            throw Error("clause " + id + " is not in " + extract_corpus);
          }
        }
      }
      std::vector<std::optional<StagedExtraction>> staged(clauses.size());
      std::vector<std::string> errors(clauses.size());
      parallel_for(clauses.size(), gw->max_in_flight(), [&](std::size_t i) {
        try {
          staged[i] = extract_clause(clauses[i], onto, *gw);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });
      bool failed = false;
      for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (!staged[i]) {
          err << "error: " << errors[i] << "\n";
          failed = true;
        }
      }
      if (failed) return 1;
      for (std::size_t i = 0; i < clauses.size(); ++i) {
        const auto path = cfg.output_dir / staging_file_name(clauses[i].id);
        write_staging(*staged[i], path);
        out << path.string() << "\t" << staged[i]->graph.triples.size() << " triples, "
            << staged[i]->graph.nested_count() << " nested\n";
      }
      return 0;
    }

    if (*commit_cmd) {
      const auto onto = load_ontology(cfg);
      std::vector<std::pair<std::string, StagedExtraction>> items;
      for (const auto& f : commit_files) {
        try {
          items.emplace_back(f, read_staging(f));
        } catch (const ParseError& e) {
          throw Error(f + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.message());
        } catch (const Error& e) {
          throw Error(f + ": " + e.what());
        }
      }
      GraphStore store = load_store(cfg);
      CommitDelta total;
      bool any_committed = false;
      for (const auto& [f, s] : items) {
        if (s.status != ReviewStatus::Approved) {
          if (!skip_unapproved) {
            throw NotApproved(f + ": status is " + std::string(to_string(s.status)) + ", only approved files commit");
          }
          out << f << "\tskipped (" << to_string(s.status) << ")\n";
          continue;
        }
        const auto d = commit(s, store, onto);
        any_committed = true;
        total.triples_added += d.triples_added;
        total.nested_added += d.nested_added;
        out << f << "\t+" << d.triples_added << " triples, +" << d.nested_added << " nested\n";
      }
      if (any_committed) save_store(store, cfg.store_path);
      out << "triples_added: " << total.triples_added << "\nnested_added: " << total.nested_added << "\n";
      return 0;
    }

    if (*ingest_cmd) {
      auto gw = make_gateway();
      const auto onto = load_ontology(cfg);
      IngestOptions io;
      io.workers = ingest_workers;
      const auto summary = ingest_corpus(read_file(ingest_corpus_path), onto, *gw, cfg.output_dir, io);
      const auto table = summary.to_markdown();
      write_file_atomic(cfg.output_dir / "ingest_summary.md", table);
      out << table;
      for (const auto& f : summary.failures) {
        err << "line " << f.line << (f.clause_id.empty() ? "" : " (" + f.clause_id + ")") << ": " << f.message
            << "\n";
      }
      return summary.files.empty() && !summary.failures.empty() ? 1 : 0;
    }

    if (*review_cmd) {
      const auto mode = *parse_review_mode(review_mode);
      auto gw = make_gateway();
      const auto clauses = read_clauses(read_file(review_corpus));

      std::optional<GraphStore> store;
      std::optional<OntologyModel> onto;
      std::optional<LexicalIndex> index;
      std::optional<ClauseCatalog> catalog;
      ReviewDeps deps;
      deps.gateway = gw.get();
      deps.retrieve.k = cfg.top_k;
      std::mutex log_mu;
      deps.log = [&](const std::string& msg) {
        std::lock_guard lock(log_mu);
        err << "notice: " << msg << "\n";
      };
      if (mode == ReviewMode::NCKG) {
        store = load_store(cfg);
        onto = load_ontology(cfg);
        index.emplace(build_index(*store, *onto));
        deps.store = &*store;
        deps.onto = &*onto;
        deps.index = &*index;
      } else if (mode == ReviewMode::VectorBaseline) {
        if (review_catalog.empty()) throw ConfigError("--mode vector needs --catalog <provisions.jsonl>");
        catalog.emplace(read_clauses(read_file(review_catalog)));
        deps.catalog = &*catalog;
      }

      std::vector<std::optional<RiskVerdict>> verdicts(clauses.size());
      std::vector<std::string> errors(clauses.size());
      parallel_for(clauses.size(), gw->max_in_flight(), [&](std::size_t i) {
        try {
          verdicts[i] = review(clauses[i], mode, deps);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });

      std::string lines;
      std::size_t ok = 0;
      for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (!verdicts[i]) {
          err << "error: clause " << clauses[i].id << ": " << errors[i] << "\n";
          continue;
        }
        ++ok;
        lines += verdict_to_json(*verdicts[i]) + "\n";
        if (verdicts[i]->retrieval) {
          write_file_atomic(cfg.output_dir / "bundles" / (std::string(staging_file_name(clauses[i].id)) + ".json"),
                            bundle_to_json(*verdicts[i]->retrieval, store->prefixes()).dump(2) + "\n");
        }
      }
      write_file_atomic(cfg.output_dir / "verdicts.jsonl", lines);
      out << "reviewed " << ok << "/" << clauses.size() << " clauses (" << to_string(mode) << ")\n";
      err << "store reads: " << (store ? store->read_count() : 0)
          << ", index reads: " << (index ? index->read_count() : 0) << "\n";
      return ok == 0 && !clauses.empty() ? 1 : 0;
    }

    if (*eval_cmd) {
      const auto gold = read_gold(read_file(eval_gold));
      const auto verdicts = read_verdicts(read_file(eval_verdicts));
      std::optional<std::map<std::string, double>> rs;
      if (!eval_rs.empty()) rs = read_rs_scores(read_file(eval_rs));
      const auto report = evaluate_run(gold, verdicts, rs);
      write_file_atomic(cfg.output_dir / "report.json", report_to_json(report));
      write_file_atomic(cfg.output_dir / "report.md", report_to_markdown(report));
      out << "macro_f1: " << fmt(report.macro_f1, 4) << "\n";
      if (report.rs_mean) out << "rs_mean: " << fmt(*report.rs_mean, 2) << "\n";
      if (!report.degenerate.empty()) {
        err << "notice: zero-denominator labels scored 0:";
        for (const auto& l : report.degenerate) err << " " << l;
        err << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace nckg::cli
