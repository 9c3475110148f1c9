// surgq: command-line front end for the engine and the HTTP service.
// Exit status: 0 on success, 1 on an engine error, 2 on bad usage.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"
#include "surgq/corpus.hpp"
#include "surgq/fusion.hpp"
#include "surgq/keyframes.hpp"
#include "surgq/metrics.hpp"
#include "surgq/polygon_json.hpp"
#include "surgq/search.hpp"
#include "surgq/service.hpp"
#include "surgq/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace surgq;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// --- fuse -------------------------------------------------------------------

struct FuseArgs {
  std::string class_map, sections, out_class, out_sections, report;
};

int run_fuse(const FuseArgs& a) {
  const auto cm = read_class_map(a.class_map);
  const auto sm = read_section_mask(a.sections);
  const auto result = fuse_detailed(cm, sm);
  write_class_map(a.out_class, result.scene.class_map);
  write_section_mask(a.out_sections, result.scene.section_mask);
  if (a.report == "json") {
    json sections = json::array();
    for (std::size_t s = 0; s < result.assignment.section_count(); ++s) {
      json tally = json::object();
      for (auto c : kAllClasses) {
        if (const auto n = result.assignment.tallies[s][to_int(c)]) tally[std::string(class_name(c))] = n;
      }
      sections.push_back({{"section", s},
                          {"class", to_int(*result.assignment.classes[s])},
                          {"merged_into", result.merged_into[s]},
                          {"tally", std::move(tally)}});
    }
    print_json({{"input_sections", sm.section_count()},
                {"output_sections", result.scene.section_mask.section_count()},
                {"sections", std::move(sections)}});
  }
  return 0;
}

// --- keyframes ---------------------------------------------------------------

struct KeyframeArgs {
  std::string features;
  KeyframeConfig config;
  std::string out = "json";
};

int run_keyframes(const KeyframeArgs& a) {
  const auto series = read_sfv(a.features);
  const auto picks = keyframe_indices(series, a.config);
  if (a.out == "json") {
    const auto signal = banded_similarity_signal(series, a.config.half_width);
    print_json({{"frames", series.size()},
                {"window", a.config.half_width},
                {"min_separation", a.config.min_separation},
                {"min_prominence", a.config.min_prominence},
                {"keyframes", picks},
                {"signal", signal.values}});
  } else {
    for (auto k : picks) std::cout << k << "\n";
  }
  return 0;
}

// --- index / search ----------------------------------------------------------

int run_index_build(const std::string& root, const std::string& grid) {
  auto project = Project::load(root);
  WriterLock lock(project.root());
  const auto index = project.rebuild_index(parse_grid(grid));
  project.save(lock);
  std::cout << "indexed " << index.size() << " frames at " << index.grid().width << "x" << index.grid().height
            << " (" << index.fingerprint() << ")\n";
  return 0;
}

struct SearchArgs {
  std::string project, query, out = "json", video;
  std::size_t k = 9;
  std::int64_t min_gap_ms = 2000;
};

int run_search(const SearchArgs& a) {
  const auto project = Project::open(a.project);
  const auto index = project.current_index();
  if (!index) throw Error(Errc::stale_index, "index missing or stale; run `surgq index build`");
  const auto scene = polygon_scene_from_json(read_json(a.query));
  SearchOptions opts;
  opts.k = a.k;
  opts.min_gap_ms = a.min_gap_ms;
  if (!a.video.empty()) opts.video_id = a.video;
  const auto result = search(*index, scene, opts);
  if (a.out == "json") {
    print_json(search_payload(result, index->fingerprint()));
  } else {
    for (const auto& h : result.hits) std::printf("%-24s %.6f\n", h.frame.key().c_str(), h.distance);
  }
  return 0;
}

// --- eval ----------------------------------------------------------------------

std::map<std::string, fs::path> png_files(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out[e.path().filename().string()] = e.path();
  }
  return out;
}

int run_eval_dice(const std::string& pred_dir, const std::string& truth_dir, const std::string& out,
                  bool background) {
  const auto preds = png_files(pred_dir);
  const auto truths = png_files(truth_dir);
  std::vector<ClassMap> pred, truth;
  for (const auto& [name, path] : truths) {
    const auto it = preds.find(name);
    if (it == preds.end()) throw MissingAsset((fs::path(pred_dir) / name).string());
    truth.push_back(read_class_map(path));
    pred.push_back(read_class_map(it->second));
  }
  if (preds.size() != truths.size()) {
    for (const auto& [name, _] : preds) {
      if (!truths.count(name)) throw MissingAsset((fs::path(truth_dir) / name).string());
    }
  }
  const auto report = dice_report(pred, truth, {background});
  if (out == "json") {
    print_json(to_json(report));
  } else {
    std::cout << format_report_table(report);
  }
  return 0;
}

int run_eval_a_at_n(const std::string& file, std::size_t n) {
  const auto judgments = parse_judgments_jsonl(read_text(file));
  const auto value = evaluate_a_at_n(judgments, n);
  std::printf("A@%zu = %.4f over %zu queries\n", n, value, judgments.size());
  return 0;
}

// --- project / import / synth ----------------------------------------------------

int run_project_validate(const std::string& root) {
  const auto project = Project::load(root);
  const auto& m = project.manifest();
  std::cout << m.name << ": " << m.frames.size() << " frames, " << m.videos.size() << " videos, "
            << m.quizzes.size() << " quizzes; index " << (project.index_stale() ? "stale" : "current") << "\n";
  return 0;
}

int run_import(const std::string& root, const std::string& src, const std::string& map, bool strict) {
  auto project = Project::open(root);
  WriterLock lock(project.root());
  const auto report = import_dataset(project, src, load_class_mapping(map), {strict});
  project.save(lock);
  std::cout << "imported " << report.frames << " frames\n";
  for (const auto& [value, pixels] : report.unmapped) {
    std::cerr << "warning: unmapped source value " << value << " (" << pixels << " px) -> Background\n";
  }
  return 0;
}

int run_synth(const SyntheticSpec& spec, const std::string& out) {
  const auto corpus = generate_synthetic(spec);
  write_synthetic_project(corpus, out);
  std::cout << "wrote " << corpus.frames.size() << " frames in " << corpus.shot_starts.size() << " shots to " << out
            << "\n";
  return 0;
}

// --- serve -------------------------------------------------------------------------

int run_serve(const std::string& root, const std::string& addr, const std::string& inpaint_url) {
  // Signals are taken synchronously by the main thread; the server runs on a worker.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ServiceConfig config;
  config.inpaint_url = inpaint_url;
  config.log = [](const std::string& line) { std::cerr << line << "\n"; };
  Api api(Project::load(root), config);
  Server server(api);
  const auto port = server.bind(parse_bind_address(addr));
  std::cerr << "serving " << root << " on " << parse_bind_address(addr).host << ":" << port << "\n";
  if (api.index_stale()) std::cerr << "index is stale; POST /index/rebuild before searching\n";

  std::thread worker([&] { server.run(); });
  int sig = 0;
  sigwait(&set, &sig);
  std::cerr << "shutting down\n";
  server.stop();
  worker.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmentation-map search and quiz authoring for surgical video frames"};
  app.require_subcommand(1);

  FuseArgs fa;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse a class map with a section mask");
  fuse_cmd->add_option("--class-map", fa.class_map)->required();
  fuse_cmd->add_option("--sections", fa.sections)->required();
  fuse_cmd->add_option("--out-class", fa.out_class)->required();
  fuse_cmd->add_option("--out-sections", fa.out_sections)->required();
  fuse_cmd->add_option("--report", fa.report, "Print per-section tallies")->check(CLI::IsMember({"json"}));

  KeyframeArgs ka;
  auto* kf_cmd = app.add_subcommand("keyframes", "Pick keyframes from an SFV1 feature file");
  kf_cmd->add_option("--features", ka.features)->required();
  kf_cmd->add_option("--window", ka.config.half_width)->check(CLI::NonNegativeNumber);
  kf_cmd->add_option("--sep", ka.config.min_separation)->check(CLI::NonNegativeNumber);
  kf_cmd->add_option("--prom", ka.config.min_prominence)->check(CLI::NonNegativeNumber);
  kf_cmd->add_option("--out", ka.out)->check(CLI::IsMember({"json", "list"}));

  std::string project_dir = env_or("SURGQ_PROJECT", "");
  std::string grid = "80x45";
  auto* index_cmd = app.add_subcommand("index", "Search index maintenance");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "Rebuild index.bin from the fused class maps");
  index_build->add_option("--project", project_dir)->required(project_dir.empty());
  index_build->add_option("--grid", grid);

  SearchArgs sa;
  sa.project = project_dir;
  auto* search_cmd = app.add_subcommand("search", "Rank frames against a polygon scene");
  search_cmd->add_option("--project", sa.project)->required(sa.project.empty());
  search_cmd->add_option("--query", sa.query, "Polygon scene JSON file")->required();
  search_cmd->add_option("--k", sa.k)->check(CLI::PositiveNumber);
  search_cmd->add_option("--min-gap-ms", sa.min_gap_ms)->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--video", sa.video);
  search_cmd->add_option("--out", sa.out)->check(CLI::IsMember({"json", "table"}));

  std::string pred_dir, truth_dir, eval_out = "table", judgments_file;
  bool no_background = false;
  std::size_t a_n = 9;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation harnesses");
  eval_cmd->require_subcommand(1);
  auto* dice_cmd = eval_cmd->add_subcommand("dice", "Pooled per-class dice of predicted vs truth class maps");
  dice_cmd->add_option("--pred", pred_dir)->required()->check(CLI::ExistingDirectory);
  dice_cmd->add_option("--truth", truth_dir)->required()->check(CLI::ExistingDirectory);
  dice_cmd->add_option("--out", eval_out)->check(CLI::IsMember({"table", "json"}));
  dice_cmd->add_flag("--no-background", no_background, "Leave Background out of the mean");
  auto* an_cmd = eval_cmd->add_subcommand("a-at-n", "A@n from JSON-lines relevance judgments");
  an_cmd->add_option("--judgments", judgments_file)->required()->check(CLI::ExistingFile);
  an_cmd->add_option("--n", a_n)->check(CLI::PositiveNumber);

  std::string project_name = "project";
  int width = 854, height = 480;
  auto* project_cmd = app.add_subcommand("project", "Project store");
  project_cmd->require_subcommand(1);
  auto* init_cmd = project_cmd->add_subcommand("init", "Create an empty project");
  init_cmd->add_option("--project", project_dir)->required(project_dir.empty());
  init_cmd->add_option("--name", project_name);
  init_cmd->add_option("--width", width)->check(CLI::PositiveNumber);
  init_cmd->add_option("--height", height)->check(CLI::PositiveNumber);
  auto* validate_cmd = project_cmd->add_subcommand("validate", "Check every file a manifest references");
  validate_cmd->add_option("--project", project_dir)->required(project_dir.empty());

  std::string src_dir, map_file;
  bool strict = false;
  auto* import_cmd = app.add_subcommand("import", "Ingest an annotated dataset");
  import_cmd->require_subcommand(1);
  auto* chole_cmd = import_cmd->add_subcommand("cholecseg", "CholecSeg8k-style watershed masks");
  chole_cmd->add_option("--project", project_dir)->required(project_dir.empty());
  chole_cmd->add_option("--src", src_dir)->required()->check(CLI::ExistingDirectory);
  chole_cmd->add_option("--map", map_file, "Class-mapping config")->required()->check(CLI::ExistingFile);
  chole_cmd->add_flag("--strict", strict, "Fail on unmapped source values");

  SyntheticSpec spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded synthetic project");
  synth_cmd->add_option("--out", synth_out, "Project directory")->required();
  synth_cmd->add_option("--frames", spec.frames)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", spec.noise)->check(CLI::Range(0.0, 0.4999));
  synth_cmd->add_option("--seed", spec.seed);
  synth_cmd->add_option("--width", spec.width)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--height", spec.height)->check(CLI::PositiveNumber);

  std::string addr = env_or("SURGQ_ADDR", "127.0.0.1:8080");
  std::string inpaint_url = env_or("SURGQ_INPAINT_URL", "");
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API over a project");
  serve_cmd->add_option("--project", project_dir, "Defaults to $SURGQ_PROJECT")->required(project_dir.empty());
  serve_cmd->add_option("--addr", addr, "host:port, defaults to $SURGQ_ADDR");
  serve_cmd->add_option("--inpaint-url", inpaint_url, "Remote inpainting backend, defaults to $SURGQ_INPAINT_URL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are reported as parse "errors" with a zero code.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fuse_cmd) return run_fuse(fa);
    if (*kf_cmd) return run_keyframes(ka);
    if (*index_build) return run_index_build(project_dir, grid);
    if (*search_cmd) return run_search(sa);
    if (*dice_cmd) return run_eval_dice(pred_dir, truth_dir, eval_out, !no_background);
    if (*an_cmd) return run_eval_a_at_n(judgments_file, a_n);
    if (*init_cmd) {
      Project::init(project_dir, project_name, width, height);
      std::cout << "initialized " << project_dir << "\n";
      return 0;
    }
    if (*validate_cmd) return run_project_validate(project_dir);
    if (*chole_cmd) return run_import(project_dir, src_dir, map_file, strict);
    if (*synth_cmd) return run_synth(spec, synth_out);
    if (*serve_cmd) return run_serve(project_dir, addr, inpaint_url);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
