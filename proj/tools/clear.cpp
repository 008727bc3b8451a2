// clear: evaluate original/improved text pairs.
//
// Exit codes: 0 ok, 1 usage, 2 input / validation / IO, 3 judge transport.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clear/clear.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitTransport = 3;

struct Options {
  std::string pairs;
  std::string annotations;
  std::string lexicon;
  std::string abbreviations;
  std::string verbs;
  std::string rst_dir;
  std::string out;
  std::string dataset;
  std::vector<std::string> levels;
  std::string judge_url;
  std::string judge_model;
  int judge_retries = 3;
  int judge_parallel = 4;
  int jobs = 1;
  bool dump_alignments = false;
  std::string correlate = "delta";
  std::vector<std::string> correlate_metrics;
  clear::AlignParams align;
  bool no_anchors = false;
  std::vector<std::string> reports;
};

std::string default_lexicon() { return std::string(CLEAR_RESOURCE_DIR) + "/en_sentiment.tsv"; }

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

void add_input_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--pairs", o.pairs, "JSONL file with id, original, improved, language, topic")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--annotations", o.annotations, "directory of <id>.<side>.json annotation bundles")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--abbreviations", o.abbreviations, "one abbreviation per line, for sentence splitting")
      ->check(CLI::ExistingFile);
}

void add_align_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--anchor-threshold", o.align.anchor_threshold, "minimum similarity for an anchor pair")
      ->capture_default_str();
  cmd->add_option("--min-score", o.align.min_score, "paired links scoring lower are split into add and delete")
      ->capture_default_str();
  cmd->add_option("--extra-penalty", o.align.extra_penalty, "penalty per extra sentence in a block")
      ->capture_default_str();
  cmd->add_option("--gap-score", o.align.gap_score, "score per sentence of an unpaired link")->capture_default_str();
  cmd->add_flag("--no-anchors", o.no_anchors, "align with one dynamic program, no anchor pass");
}

void add_judge_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--judge-url", o.judge_url, "OpenAI-compatible base URL, e.g. http://127.0.0.1:8000/v1");
  cmd->add_option("--judge-model", o.judge_model, "model name sent to the judge");
  cmd->add_option("--judge-retries", o.judge_retries, "retries per call after an unparsable answer")
      ->check(CLI::Range(0, 20))
      ->capture_default_str();
  cmd->add_option("--judge-parallel", o.judge_parallel, "concurrent judge requests")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
}

std::optional<clear::JudgeConfig> judge_config(const Options& o) {
  if (o.judge_url.empty()) return std::nullopt;
  clear::JudgeConfig c;
  c.base_url = o.judge_url;
  c.model = o.judge_model;
  c.retries = o.judge_retries;
  c.max_in_flight = o.judge_parallel;
  if (const char* key = std::getenv("CLEAR_JUDGE_API_KEY")) c.api_key = key;
  return c;
}

clear::RunConfig run_config(const Options& o) {
  clear::RunConfig c;
  c.pairs_path = o.pairs;
  c.annotations_dir = opt_path(o.annotations);
  c.lexicon_path = opt_path(o.lexicon);
  c.abbreviations_path = opt_path(o.abbreviations);
  c.verbs_path = opt_path(o.verbs);
  c.rst_dir = opt_path(o.rst_dir);
  c.dataset = o.dataset;
  if (!o.levels.empty()) {
    c.levels.clear();
    for (const auto& l : o.levels) {
      auto level = clear::parse_level(l);
      if (!c.enabled(level)) c.levels.push_back(level);
    }
  }
  c.judge = judge_config(o);
  c.align = o.align;
  c.align.use_anchors = !o.no_anchors;
  c.correlation = clear::parse_correlation_mode(o.correlate);
  c.correlation_metrics = o.correlate_metrics;
  c.dump_alignments = o.dump_alignments;
  c.jobs = o.jobs;
  return c;
}

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  clear::write_file(out, [&](std::ostream& s) { s << content; });
}

int cmd_eval(const Options& o) {
  auto config = run_config(o);
  auto report = clear::run_eval(config);
  auto files = clear::emit_all(report, o.out);
  if (config.dump_alignments) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& p : report.pairs) {
      auto links = nlohmann::ordered_json::array();
      for (const auto& l : p.alignment) links.push_back(clear::detail::link_json(l));
      j[p.id] = {{"backend", p.alignment_backend}, {"links", links}};
    }
    auto path = fs::path(o.out) / "alignments.json";
    clear::write_file(path, [&](std::ostream& s) { s << j.dump(1) << "\n"; });
    files.push_back(path);
  }
  for (const auto& p : report.pairs)
    for (const auto& w : p.warnings) std::cerr << "warning: pair '" << p.id << "': " << w << "\n";
  std::cerr << "evaluated " << report.pairs.size() << " pairs, wrote " << files.size() << " files to " << o.out
            << "\n";
  return 0;
}

int cmd_align(const Options& o) {
  auto config = run_config(o);
  auto corpus = clear::load_pairs(config.pairs_path);
  auto res = clear::EvalResources::load(config);
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& pair : corpus) {
    auto side = [&](clear::Side s) { return clear::detail::side_inputs(pair, s, config, res); };
    auto a = side(clear::Side::original), b = side(clear::Side::improved);
    auto al = clear::align_sentences(a.sentences, b.sentences, a.bundle, b.bundle, config.align, config.bounds);
    auto links = nlohmann::ordered_json::array();
    for (const auto& l : al.links) links.push_back(clear::detail::link_json(l));
    j[pair.id] = {{"backend", al.backend},
                  {"original_sentences", a.sentences},
                  {"improved_sentences", b.sentences},
                  {"links", links},
                  {"counts", clear::detail::transformations_json(al.counts)}};
  }
  write_or_print(o.out, j.dump(1) + "\n");
  return 0;
}

int cmd_bias(const Options& o) {
  std::vector<clear::ReportBundle> reports;
  for (const auto& r : o.reports) reports.push_back(clear::load_report(r));
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw clear::IoError("cannot create output directory " + o.out + ": " + ec.message());
  fs::path dir(o.out);
  for (auto level : clear::kAllLevels) {
    bool any = false;
    for (const auto& r : reports) any = any || r.enabled(level);
    if (!any) continue;
    clear::write_file(dir / ("heatmap_" + std::string(clear::to_string(level)) + ".csv"), [&](std::ostream& s) {
      clear::write_heatmap_csv(clear::build_heatmap(reports, level), s);
    });
  }
  clear::write_file(dir / "transformations.csv",
                    [&](std::ostream& s) { clear::write_transformations_csv(reports, s); });
  clear::write_file(dir / "components.csv", [&](std::ostream& s) { clear::write_components_csv(reports, s); });
  auto mode = clear::parse_correlation_mode(o.correlate);
  for (const auto& r : reports) {
    auto bias = clear::compute_bias(r.pairs, mode, o.correlate_metrics);
    clear::write_file(dir / ("correlations_" + r.dataset + ".csv"),
                      [&](std::ostream& s) { clear::write_correlations_csv(bias, s); });
  }
  std::cerr << "aggregated " << reports.size() << " reports into " << o.out << "\n";
  return 0;
}

int cmd_stats(const Options& o) {
  auto corpus = clear::load_pairs(o.pairs);
  clear::AbbreviationList abbreviations;
  if (!o.abbreviations.empty()) abbreviations = clear::AbbreviationList::from_file(o.abbreviations);
  nlohmann::ordered_json j{{"original", clear::to_json(clear::dataset_stats(corpus, clear::Side::original, abbreviations))},
                           {"improved", clear::to_json(clear::dataset_stats(corpus, clear::Side::improved, abbreviations))}};
  write_or_print(o.out, j.dump(1) + "\n");
  return 0;
}

int cmd_judge(const Options& o) {
  auto jc = judge_config(o);
  if (!jc) throw clear::ValidationError("judge needs --judge-url");
  auto corpus = clear::load_pairs(o.pairs);
  std::vector<clear::JudgeRequest> requests;
  for (const auto& p : corpus)
    for (auto side : {clear::Side::original, clear::Side::improved})
      for (auto d : {clear::Dimension::coherence, clear::Dimension::persuasion})
        requests.push_back({p.id, side, d, p.text(side)});
  auto factory = [&] { return std::make_unique<clear::HttpChatClient>(*jc); };
  auto results = clear::judge_batch(std::span<const clear::JudgeRequest>(requests), factory, jc->retries,
                                    jc->max_in_flight);
  auto arr = nlohmann::ordered_json::array();
  int transport = 0;
  for (const auto& r : results) {
    if (r.failure == clear::JudgeFailure::transport) ++transport;
    arr.push_back({{"pair_id", r.pair_id},
                   {"side", clear::to_string(r.side)},
                   {"dimension", clear::to_string(r.dimension)},
                   {"score", r.score ? nlohmann::ordered_json(*r.score) : nlohmann::ordered_json(nullptr)},
                   {"attempts", r.attempts},
                   {"failure", clear::detail::to_string(r.failure)},
                   {"raw_response", r.raw_response}});
  }
  write_or_print(o.out, arr.dump(1) + "\n");
  if (transport) {
    std::cerr << "error: " << transport << " judge calls failed to reach " << jc->base_url << "\n";
    return kExitTransport;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate text rewrites on lexical, syntactic, semantic and pragmatic levels"};
  app.set_version_flag("--version", std::string(clear::kVersion));
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);
  Options o;
  o.lexicon = default_lexicon();

  auto* eval = app.add_subcommand("eval", "compute all metrics and write report.json plus CSV tables");
  add_input_options(eval, o);
  eval->add_option("--lexicon", o.lexicon, "English sentiment lexicon (word, polarity, subjectivity)")
      ->check(CLI::ExistingFile)
      ->capture_default_str();
  eval->add_option("--verbs", o.verbs, "communication verb lemmas for reported speech")->check(CLI::ExistingFile);
  eval->add_option("--rst-dir", o.rst_dir, "directory of <id>.<side>.rst trees")->check(CLI::ExistingDirectory);
  eval->add_option("--out", o.out, "output directory")->required();
  eval->add_option("--levels", o.levels, "levels to compute")
      ->delimiter(',')
      ->check(CLI::IsMember({"lexical", "syntactic", "semantic", "pragmatic"}));
  eval->add_option("--dataset", o.dataset, "row label in heatmaps (default: pairs file name)");
  eval->add_option("--jobs,-j", o.jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  eval->add_flag("--dump-alignments", o.dump_alignments, "also write alignments.json");
  eval->add_option("--correlate", o.correlate, "correlate length with deltas, improved values, or both")
      ->check(CLI::IsMember({"delta", "raw", "both"}))
      ->capture_default_str();
  eval->add_option("--correlate-metrics", o.correlate_metrics, "restrict correlations to these metrics")
      ->delimiter(',');
  add_judge_options(eval, o);
  add_align_options(eval, o);

  auto* align = app.add_subcommand("align", "print sentence alignments and transformation counts as JSON");
  add_input_options(align, o);
  align->add_option("--out", o.out, "output file (default: stdout)");
  add_align_options(align, o);

  auto* bias = app.add_subcommand("bias", "combine reports from several datasets into heatmap tables");
  bias->add_option("--report", o.reports, "report.json from eval; repeatable")->required()->check(CLI::ExistingFile);
  bias->add_option("--out", o.out, "output directory")->required();
  bias->add_option("--correlate", o.correlate, "delta, raw or both")
      ->check(CLI::IsMember({"delta", "raw", "both"}))
      ->capture_default_str();
  bias->add_option("--correlate-metrics", o.correlate_metrics, "restrict correlations to these metrics")
      ->delimiter(',');

  auto* stats = app.add_subcommand("stats", "dataset statistics for both sides");
  add_input_options(stats, o);
  stats->add_option("--out", o.out, "output file (default: stdout)");

  auto* judge = app.add_subcommand("judge", "score coherence and persuasion with a chat model");
  judge->add_option("--pairs", o.pairs, "JSONL pairs file")->required()->check(CLI::ExistingFile);
  judge->add_option("--out", o.out, "output file (default: stdout)");
  add_judge_options(judge, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(o);
    if (*align) return cmd_align(o);
    if (*bias) return cmd_bias(o);
    if (*stats) return cmd_stats(o);
    if (*judge) return cmd_judge(o);
  } catch (const clear::TransportError& e) {
    std::cerr << "error: judge unreachable: " << e.what() << "\n";
    return kExitTransport;
  } catch (const clear::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
