#include "agentslice/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "agentslice/agents.hpp"
#include "agentslice/eval.hpp"
#include "agentslice/llm.hpp"

namespace agentslice {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CriterionSpec {
  std::string file;
  int line = 0;
  std::vector<std::string> variables;
};

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// file:line[:var,var]
CriterionSpec parse_criterion_flag(const std::string& text) {
  auto last = text.rfind(':');
  if (last == std::string::npos) throw UsageError("criterion must look like file:line[:vars], got '" + text + "'");
  if (auto line = parse_int(std::string_view(text).substr(last + 1))) {
    if (last == 0 || *line < 1) throw UsageError("bad criterion '" + text + "'");
    return {text.substr(0, last), *line, {}};
  }
  auto prev = text.rfind(':', last - 1);
  if (prev == std::string::npos || last == 0) throw UsageError("bad criterion '" + text + "'");
  auto line = parse_int(std::string_view(text).substr(prev + 1, last - prev - 1));
  if (!line || prev == 0 || *line < 1) throw UsageError("bad criterion '" + text + "'");
  CriterionSpec spec{text.substr(0, prev), *line, {}};
  std::stringstream vars(text.substr(last + 1));
  std::string v;
  while (std::getline(vars, v, ',')) {
    if (!v.empty()) spec.variables.push_back(v);
  }
  return spec;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct BackendFlags {
  std::string replay;
  std::string record;
  std::string model;
  int max_iters = 5;
  int max_expansions = 10;
  long budget = 200000;
  std::string templates;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--model", f.model, "Model id (default: $SLICEMATE_MODEL or gpt-4o)");
  cmd->add_option("--max-iters", f.max_iters, "Verify/refine rounds")->default_val(5)->check(CLI::PositiveNumber);
  cmd->add_option("--max-expansions", f.max_expansions, "Call expansion rounds")
      ->default_val(10)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget", f.budget, "Token budget per slicing run")->default_val(200000)->check(CLI::PositiveNumber);
  auto* replay = cmd->add_option("--replay", f.replay, "Serve model calls from this cassette only");
  auto* record = cmd->add_option("--record", f.record, "Forward cache misses to the endpoint and append them here");
  replay->excludes(record);
  cmd->add_option("--templates", f.templates, "Directory of prompt template overrides")->check(CLI::ExistingDirectory);
}

SessionConfig session_config(const BackendFlags& f) {
  SessionConfig c;
  c.max_verify_refine = f.max_iters;
  c.max_expansion_rounds = f.max_expansions;
  c.token_budget = f.budget;
  c.model_id = f.model.empty() ? model_from_env() : f.model;
  return c;
}

std::shared_ptr<ChatBackend> live_backend() {
  auto cfg = HttpConfig::from_env();
  if (cfg.api_key.empty()) throw UsageError("SLICEMATE_API_KEY is not set; use --replay for offline runs");
  return std::make_shared<HttpChatBackend>(cfg);
}

std::shared_ptr<ChatBackend> make_backend(const BackendFlags& f) {
  if (!f.replay.empty()) {
    if (!std::filesystem::exists(f.replay)) throw UsageError("cassette not found: " + f.replay);
    return std::make_shared<CassetteBackend>(load_cassette(f.replay), CassetteMode::replay);
  }
  if (!f.record.empty()) {
    Cassette existing = std::filesystem::exists(f.record) ? load_cassette(f.record) : Cassette{};
    return std::make_shared<CassetteBackend>(std::move(existing), CassetteMode::record, live_backend(),
                                             std::filesystem::path(f.record));
  }
  return live_backend();
}

PromptLibrary prompts_for(const BackendFlags& f) {
  return f.templates.empty() ? PromptLibrary::defaults() : PromptLibrary::load(f.templates);
}

json counters_json(const SessionCounters& c) {
  return {{"synthesis_passes", c.synthesis_passes},   {"expansion_rounds", c.expansion_rounds},
          {"verify_refine_rounds", c.verify_refine_rounds}, {"conciseness_calls", c.conciseness_calls},
          {"completeness_calls", c.completeness_calls}, {"refinements", c.refinements},
          {"format_retries", c.format_retries}};
}

json config_json(const SessionConfig& c, const BackendFlags& f) {
  json j = {{"model", c.model_id},
            {"temperature", c.temperature},
            {"max_verify_refine", c.max_verify_refine},
            {"max_expansion_rounds", c.max_expansion_rounds},
            {"token_budget", c.token_budget}};
  if (!f.replay.empty()) j["replay"] = f.replay;
  if (!f.record.empty()) j["record"] = f.record;
  if (!f.templates.empty()) j["templates"] = f.templates;
  return j;
}

// --- slice -------------------------------------------------------------------

struct SliceFlags {
  std::string workspace;
  std::string criterion;
  std::string out;
  std::string transcript;
  std::string manifest;
  BackendFlags backend;
};

int cmd_slice(const SliceFlags& f, std::ostream& out, std::ostream& err) {
  auto spec = parse_criterion_flag(f.criterion);
  std::vector<std::string> warnings;
  auto ws = std::make_shared<const Workspace>(load_workspace_dir(f.workspace, &warnings));
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  if (!ws->find(spec.file)) throw UsageError("criterion file not in workspace: " + spec.file);
  auto criterion = make_criterion(*ws, spec.file, spec.line, spec.variables);
  auto config = session_config(f.backend);
  auto backend = make_backend(f.backend);
  auto prompts = prompts_for(f.backend);

  json manifest = {{"command", "slice"},
                   {"workspace", f.workspace},
                   {"criterion", f.criterion},
                   {"config", config_json(config, f.backend)}};
  json artifacts = json::object();
  auto start = std::chrono::steady_clock::now();
  auto finish = [&](const std::string& outcome, const std::vector<AgentStep>& transcript, long tokens,
                    const SessionCounters& counters) {
    if (!f.transcript.empty()) {
      write_transcript(transcript, f.transcript);
      artifacts["transcript"] = f.transcript;
    }
    if (!f.manifest.empty()) {
      manifest["outcome"] = outcome;
      manifest["tokens"] = tokens;
      manifest["counters"] = counters_json(counters);
      manifest["elapsed_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      manifest["artifacts"] = artifacts;
      write_text(f.manifest, manifest.dump(2) + "\n", out);
    }
  };
  try {
    auto result = run_pipeline(build_index(ws), criterion, backend, config, prompts);
    write_text(f.out, slice_to_json(result.slice, result.hallucinated).dump(2) + "\n", out);
    if (!f.out.empty()) artifacts["slice"] = f.out;
    finish("ok", result.transcript, result.tokens_used, result.counters);
    return kExitOk;
  } catch (const PipelineError& e) {
    json doc = e.last_valid() ? slice_to_json(*e.last_valid(), {}, std::string(e.what()))
                              : slice_to_json(Slice(criterion), {}, std::string(e.what()));
    if (!e.last_valid()) doc["lines"] = json::array();
    if (!f.out.empty()) {
      write_text(f.out, doc.dump(2) + "\n", out);
      artifacts["slice"] = f.out;
    }
    long tokens = 0;
    for (const auto& s : e.transcript()) tokens += s.usage.total();
    finish("error: " + std::string(e.what()), e.transcript(), tokens, e.counters());
    err << "error: " << e.what() << "\n";
    if (!f.transcript.empty()) err << "transcript snapshot: " << f.transcript << "\n";
    return kExitPipeline;
  }
}

// --- eval --------------------------------------------------------------------

struct EvalFlags {
  std::string benchmark;
  std::string predictions;
  std::string format = "json";
  std::string out;
  std::string manifest;
  std::string transcripts;
  int workers = 1;
  BackendFlags backend;
};

int cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  auto fmt = parse_report_format(f.format);
  if (!fmt) throw UsageError("unknown format " + f.format);
  if (!f.predictions.empty() && (!f.backend.replay.empty() || !f.backend.record.empty())) {
    throw UsageError("--predictions cannot be combined with --replay or --record");
  }
  auto instances = load_benchmark(f.benchmark);
  if (instances.empty()) throw UsageError("benchmark has no instances");

  json manifest = {{"command", "eval"}, {"benchmark", f.benchmark}, {"workers", f.workers}};
  json per_instance = json::array();
  std::vector<std::optional<LineSet>> predictions(instances.size());

  if (!f.predictions.empty()) {
    manifest["mode"] = "predictions";
    manifest["predictions"] = f.predictions;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      auto path = std::filesystem::path(f.predictions) / (instances[i].id + ".json");
      json entry = {{"id", instances[i].id}};
      if (!std::filesystem::exists(path)) {
        err << "warning: no prediction for " << instances[i].id << "\n";
        entry["outcome"] = "error: missing prediction";
      } else {
        std::ifstream in(path, std::ios::binary);
        json doc;
        try {
          doc = json::parse(in);
        } catch (const json::exception& e) {
          fail(ErrorKind::SchemaError, path.string() + ": invalid JSON: " + e.what());
        }
        try {
          predictions[i] = to_line_set(slice_from_json(doc, *instances[i].workspace));
        } catch (const Error& e) {
          fail(ErrorKind::SchemaError, path.string() + ": " + e.what());
        }
        entry["outcome"] = "ok";
        entry["prediction"] = path.string();
      }
      per_instance.push_back(entry);
    }
  } else {
    auto config = session_config(f.backend);
    manifest["mode"] = "end-to-end";
    manifest["config"] = config_json(config, f.backend);
    auto backend = make_backend(f.backend);
    auto outcomes = run_instances(instances, backend, config, prompts_for(f.backend), f.workers);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      if (o.slice) predictions[i] = to_line_set(*o.slice);
      json entry = {{"id", o.id},
                    {"outcome", o.ok ? std::string("ok") : "error: " + o.error},
                    {"elapsed_ms", o.elapsed_ms},
                    {"tokens", o.tokens},
                    {"counters", counters_json(o.counters)}};
      if (!f.transcripts.empty()) {
        auto path = std::filesystem::path(f.transcripts) / (o.id + ".jsonl");
        write_transcript(o.transcript, path);
        entry["transcript"] = path.string();
      }
      if (!o.ok) err << "warning: " << o.id << " failed: " << o.error << "\n";
      per_instance.push_back(entry);
    }
  }

  auto ev = evaluate(instances, predictions);
  for (std::size_t i = 0; i < ev.rows.size(); ++i) {
    per_instance[i]["metrics"] = row_to_json(ev.rows[i]);
    for (const auto& w : ev.rows[i].warnings) err << "warning: " << ev.rows[i].id << ": " << w << "\n";
  }
  write_text(f.out, emit_report(ev.summary, *fmt), out);
  if (!f.manifest.empty()) {
    manifest["instances"] = per_instance;
    json artifacts = json::object();
    if (!f.out.empty()) artifacts["report"] = f.out;
    if (!f.transcripts.empty()) artifacts["transcripts"] = f.transcripts;
    manifest["artifacts"] = artifacts;
    write_text(f.manifest, manifest.dump(2) + "\n", out);
  }
  return kExitOk;
}

// --- cassette ----------------------------------------------------------------

int cmd_inspect(const std::string& path, std::ostream& out) {
  auto c = load_cassette(path);
  std::map<std::string, std::size_t> models;
  long prompt = 0, completion = 0;
  for (const auto& e : c.entries()) {
    ++models[e.request.model_id];
    prompt += e.response.usage.prompt_tokens;
    completion += e.response.usage.completion_tokens;
  }
  out << "entries: " << c.size() << "\n";
  for (const auto& [m, n] : models) out << "model " << m << ": " << n << "\n";
  out << "prompt_tokens: " << prompt << "\ncompletion_tokens: " << completion << "\n";
  return kExitOk;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& target, std::ostream& out) {
  Cassette merged;
  for (const auto& in : inputs) merged = merge_cassettes(merged, load_cassette(in));
  save_cassette(merged, target);
  out << "merged " << inputs.size() << " cassettes into " << target << ": " << merged.size() << " entries\n";
  return kExitOk;
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  auto c = load_cassette(path);
  auto bad = verify_cassette(c);
  if (bad.empty()) {
    out << "ok: " << c.size() << " entries\n";
    return kExitOk;
  }
  for (const auto& fp : bad) err << "fingerprint mismatch: " << fp << "\n";
  return kExitCassette;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError: return kExitSchema;
    case ErrorKind::CassetteConflict:
    case ErrorKind::CorruptCassette: return kExitCassette;
    case ErrorKind::CriterionNotFound:
    case ErrorKind::UnsupportedLanguage:
    case ErrorKind::EmptyWorkspace:
    case ErrorKind::DuplicatePath:
    case ErrorKind::InvalidTemplate:
    case ErrorKind::PreconditionViolation: return kExitUsage;
    default: return kExitPipeline;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Backward slicing with cooperating LLM agents", "agentslice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "agentslice 0.1.0");

  SliceFlags sf;
  auto* slice = app.add_subcommand("slice", "Slice one criterion in a workspace");
  slice->add_option("--workspace", sf.workspace, "Source directory")->required()->check(CLI::ExistingDirectory);
  slice->add_option("--criterion", sf.criterion, "file:line[:var,...] relative to the workspace")->required();
  slice->add_option("--out", sf.out, "Slice JSON output (default: stdout)");
  slice->add_option("--transcript", sf.transcript, "Agent transcript JSONL");
  slice->add_option("--manifest", sf.manifest, "Run manifest JSON");
  add_backend_flags(slice, sf.backend);

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Score predictions or run the pipeline over a benchmark");
  eval->add_option("--benchmark", ef.benchmark, "Benchmark JSON")->required();
  eval->add_option("--predictions", ef.predictions, "Directory of <id>.json slices to score")
      ->check(CLI::ExistingDirectory);
  eval->add_option("--format", ef.format, "json, csv or markdown")
      ->default_val("json")
      ->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
  eval->add_option("--out", ef.out, "Report output (default: stdout)");
  eval->add_option("--manifest", ef.manifest, "Run manifest JSON");
  eval->add_option("--workers", ef.workers, "Concurrent slicing sessions")->default_val(1)->check(CLI::PositiveNumber);
  eval->add_option("--transcripts", ef.transcripts, "Directory for per-instance transcripts");
  add_backend_flags(eval, ef.backend);

  auto* cassette = app.add_subcommand("cassette", "Inspect, merge or verify cassettes");
  cassette->require_subcommand(1);
  std::string inspect_path, verify_path, merge_out;
  std::vector<std::string> merge_inputs;
  auto* inspect = cassette->add_subcommand("inspect", "Print entry counts");
  inspect->add_option("cassette", inspect_path, "Cassette file")->required();
  auto* merge = cassette->add_subcommand("merge", "Union of cassettes");
  merge->add_option("inputs", merge_inputs, "Cassette files")->required()->expected(1, -1);
  merge->add_option("--out", merge_out, "Merged cassette")->required();
  auto* verify = cassette->add_subcommand("verify", "Re-hash every entry");
  verify->add_option("cassette", verify_path, "Cassette file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*slice) return cmd_slice(sf, out, err);
    if (*eval) return cmd_eval(ef, out, err);
    if (*inspect) return cmd_inspect(inspect_path, out);
    if (*merge) return cmd_merge(merge_inputs, merge_out, out);
    if (*verify) return cmd_verify(verify_path, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace agentslice
