#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "tkg/config.hpp"
#include "tkg/error.hpp"
#include "tkg/graph.hpp"
#include "tkg/profile.hpp"
#include "tkg/scene.hpp"
#include "tkg/synth.hpp"
#include "tkg/templates.hpp"
#include "tkg/tubelet.hpp"
#include "tkg/validate.hpp"

namespace tkg::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,
  kInputError = 2,
  kInfeasible = 3,
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;  // overrides master_seed
  unsigned threads = 1;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "sha256 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const fs::path& path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

// Effective configuration: file keys, then command-line overrides.
struct LoadedConfig {
  PipelineConfig config;
  std::map<std::string, std::string> values;
};

inline LoadedConfig load_config(const Context& ctx) {
  std::map<std::string, std::string> kv;
  if (ctx.config_path) kv = parse_config_text(read_file(*ctx.config_path));
  if (ctx.seed) kv["master_seed"] = std::to_string(*ctx.seed);
  return {config_from_values(kv), kv};
}

inline std::uint64_t require_seed(const PipelineConfig& c) {
  if (!c.master_seed)
    throw Error(ErrorCode::ConfigError, "missing key \"master_seed\" (set it or pass --seed)");
  return *c.master_seed;
}

// Maps library errors to the exit-code contract and prints a diagnostic.
template <typename Fn>
int guarded(const Context& ctx, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    ctx.err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InsufficientGraph ? kInfeasible : kInputError;
  } catch (const fs::filesystem_error& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

// ---- stages ----------------------------------------------------------------

struct SceneArtifacts {
  SceneScript script;
  std::vector<Tubelet> tubelets;
};

inline SceneArtifacts stage_gen_scene(const PipelineConfig& c, std::uint64_t seed) {
  SceneArtifacts a;
  a.script = generate_random_script(c.scene, seed);
  a.tubelets = generate_scene(a.script, c.geometry, seed);
  return a;
}

struct ValidationOutcome {
  std::vector<QASample> samples;  // verified_depth filled where checkable
  std::vector<Violation> violations;
  std::optional<AlignmentMatrix> matrix;
};

inline ValidationOutcome stage_validate(const KnowledgeGraph& g, std::vector<QASample> samples,
                                        std::size_t max_depth, unsigned threads) {
  std::vector<std::vector<Violation>> found(samples.size());
  std::vector<char> audited(samples.size(), 0);
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    auto& s = samples[i];
    found[i] = check_sample(g, s);
    if (!found[i].empty()) return;
    audited[i] = 1;
    const std::size_t v = verify_depth(g, s);
    if (s.verified_depth && *s.verified_depth != v)
      found[i].push_back({s.sample_id, ViolationKind::DepthBookkeeping,
                          "stored verified_depth " + std::to_string(*s.verified_depth) +
                              ", recomputed " + std::to_string(v)});
    s.verified_depth = v;
  });
  ValidationOutcome out;
  for (auto& f : found) out.violations.insert(out.violations.end(), f.begin(), f.end());
  std::vector<QASample> verified;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (audited[i]) verified.push_back(samples[i]);
  if (!verified.empty()) out.matrix = alignment_matrix(verified, max_depth);
  out.samples = std::move(samples);
  return out;
}

inline void print_tallies(std::ostream& os, const SynthesisResult& r) {
  for (const auto& [depth, t] : r.tallies) {
    os << "depth " << depth << ": accepted " << t.accepted << " of " << t.attempts
       << " attempts";
    for (const auto& [reason, n] : t.rejected) os << ", " << to_string(reason) << " " << n;
    os << "\n";
  }
}

// ---- commands --------------------------------------------------------------

inline int cmd_gen_scene(const Context& ctx, const fs::path& out_dir) {
  return guarded(ctx, [&] {
    const auto cfg = load_config(ctx).config;
    const auto seed = require_seed(cfg);
    try {
      const auto a = stage_gen_scene(cfg, seed);
      const auto script_path = out_dir / "script.json";
      write_file(script_path, serialize_script(a.script));
      write_file(out_dir / "tubelets.jsonl", write_tubelets(a.tubelets));
      ctx.out << script_path.string() << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleParams && e.code() != ErrorCode::InfeasibleScript)
        throw;
      ctx.err << "error: " << e.what() << "\n";
      return static_cast<int>(kInputError);
    }
    return static_cast<int>(kOk);
  });
}

inline int cmd_build_graph(const Context& ctx, const fs::path& tubelets_path,
                           const fs::path& out_path) {
  return guarded(ctx, [&] {
    const auto cfg = load_config(ctx).config;
    std::ifstream in(tubelets_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + tubelets_path.string());
    const auto tubelets = parse_tubelets(in);
    const auto g = build_graph(tubelets, cfg.detection, ctx.threads);
    write_file(out_path, serialize_graph(g));
    ctx.out << "nodes " << g.node_count() << " edges " << g.edge_count() << "\n";
    return static_cast<int>(kOk);
  });
}

inline int cmd_synth(const Context& ctx, const fs::path& graph_path, const fs::path& out_path) {
  return guarded(ctx, [&] {
    const auto cfg = load_config(ctx).config;
    const auto seed = require_seed(cfg);
    const auto g = deserialize_graph(read_file(graph_path));
    auto opts = cfg.synthesis;
    opts.threads = ctx.threads;
    const auto r = synthesize_dataset(g, cfg.plan, builtin_templates(), seed, opts);
    write_file(out_path, write_dataset(r.samples));
    print_tallies(ctx.out, r);
    return static_cast<int>(kOk);
  });
}

inline int cmd_validate(const Context& ctx, const fs::path& graph_path,
                        const fs::path& dataset_path, const fs::path& out_path) {
  return guarded(ctx, [&] {
    const auto cfg = load_config(ctx).config;
    const auto g = deserialize_graph(read_file(graph_path));
    auto samples = parse_dataset(read_file(dataset_path));
    const auto v = stage_validate(g, std::move(samples), cfg.max_depth, ctx.threads);
    write_file(out_path, validation_report(v.matrix, v.violations));
    ctx.out << "samples " << v.samples.size() << " violations " << v.violations.size();
    if (v.matrix) ctx.out << " diagonal_dominance " << diagonal_dominance(*v.matrix);
    ctx.out << "\n";
    return static_cast<int>(v.violations.empty() ? kOk : kViolations);
  });
}

inline int cmd_profile(const Context& ctx, const fs::path& dataset_path, const fs::path& out_path) {
  return guarded(ctx, [&] {
    const auto samples = parse_dataset(read_file(dataset_path));
    const auto st = profile_dataset(samples);
    write_file(out_path, stats_document(st));
    ctx.out << "samples " << st.size << "\n";
    return static_cast<int>(kOk);
  });
}

inline int cmd_eval(const Context& ctx, const fs::path& dataset_path,
                    const fs::path& predictions_path, const fs::path& out_path) {
  return guarded(ctx, [&] {
    const auto cfg = load_config(ctx).config;
    const auto samples = parse_dataset(read_file(dataset_path));
    if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "no samples to score");
    const auto preds = parse_predictions(read_file(predictions_path));
    const auto m = evaluate_predictions(samples, preds, cfg.eval_thresholds);
    write_file(out_path, metrics_document(m));
    ctx.out << "scored " << m.n_scored << " mean_tIoU " << m.mean_tiou << "\n";
    return static_cast<int>(kOk);
  });
}

// End to end: scene (generated or ingested) -> graph -> dataset -> report ->
// stats, plus a manifest of content hashes. Stops at the first failing stage.
inline int cmd_run(const Context& ctx, const fs::path& out_dir) {
  return guarded(ctx, [&]() -> int {
    const auto loaded = load_config(ctx);
    const auto& cfg = loaded.config;
    const auto seed = require_seed(cfg);

    nlohmann::ordered_json inputs;
    inputs["config"] = sha256_hex(canonical_config(loaded.values));
    std::vector<Tubelet> tubelets;
    if (cfg.tubelets_path) {
      const auto text = read_file(*cfg.tubelets_path);
      inputs["tubelets"] = sha256_hex(text);
      tubelets = parse_tubelets(text);
    } else {
      SceneArtifacts a;
      try {
        a = stage_gen_scene(cfg, seed);
      } catch (const Error& e) {
        ctx.err << "error: gen-scene: " << e.what() << "\n";
        return kInputError;
      }
      const auto script = serialize_script(a.script);
      write_file(out_dir / "script.json", script);
      inputs["scene_script"] = sha256_hex(script);
      tubelets = std::move(a.tubelets);
    }

    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    auto emit = [&](const std::string& name, const std::string& data) {
      write_file(out_dir / name, data);
      nlohmann::ordered_json a;
      a["name"] = name;
      a["sha256"] = sha256_hex(data);
      artifacts.push_back(std::move(a));
    };
    auto write_manifest = [&] {
      nlohmann::ordered_json m;
      m["master_seed"] = seed;
      m["inputs"] = inputs;
      m["artifacts"] = artifacts;
      write_file(out_dir / "manifest.json", m.dump(1) + "\n");
    };

    emit("tubelets.jsonl", write_tubelets(tubelets));
    const auto g = build_graph(tubelets, cfg.detection, ctx.threads);
    emit("graph.json", serialize_graph(g));
    ctx.out << "build-graph: nodes " << g.node_count() << " edges " << g.edge_count() << "\n";

    auto opts = cfg.synthesis;
    opts.threads = ctx.threads;
    SynthesisResult r;
    try {
      r = synthesize_dataset(g, cfg.plan, builtin_templates(), seed, opts);
    } catch (const Error& e) {
      ctx.err << "error: synth: " << e.what() << "\n";
      write_manifest();
      return e.code() == ErrorCode::InsufficientGraph ? kInfeasible : kInputError;
    }
    emit("dataset.jsonl", write_dataset(r.samples));
    ctx.out << "synth:\n";
    print_tallies(ctx.out, r);

    const auto v = stage_validate(g, r.samples, cfg.max_depth, ctx.threads);
    emit("report.json", validation_report(v.matrix, v.violations));
    ctx.out << "validate: violations " << v.violations.size();
    if (v.matrix) ctx.out << " diagonal_dominance " << diagonal_dominance(*v.matrix);
    ctx.out << "\n";
    if (!v.violations.empty()) {
      write_manifest();
      return kViolations;
    }

    emit("stats.json", stats_document(profile_dataset(r.samples)));
    write_manifest();
    ctx.out << "manifest: " << (out_dir / "manifest.json").string() << "\n";
    return kOk;
  });
}

}  // namespace tkg::cli
