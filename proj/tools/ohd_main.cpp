// ohd: batch front end for the orthogonal table-decomposition pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 malformed input, 3 predicate
// unavailable, 4 remote service unavailable, 5 I/O failure.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ohd/arbitration.hpp"
#include "ohd/evaluation.hpp"
#include "ohd/generator.hpp"
#include "ohd/induction.hpp"
#include "ohd/lineage.hpp"
#include "ohd/llm_client.hpp"
#include "ohd/predicate.hpp"
#include "ohd/table_io.hpp"

namespace fs = std::filesystem;

namespace {

struct PipelineConfig {
  std::string predicate_mode = "heuristic";  // heuristic | llm | cached
  std::string cache_path;
  std::string endpoint;
  std::string model;
  std::string primary_axis = "column";
  std::string input;
  std::string out_dir;
  std::string allow_list;
  std::string deny_list;
  bool offline = false;
  int parallel = 4;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << content;
}

ohd::EndpointConfig endpoint_config(const PipelineConfig& cfg) {
  ohd::EndpointConfig ep;
  ep.url = cfg.endpoint;
  ep.model = cfg.model;
  if (const char* key = std::getenv("OHD_API_KEY")) ep.api_key = key;
  return ep;
}

void load_pair_list(const std::string& path,
                    const std::function<void(const std::string&, const std::string&)>& add) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ohd::MalformedInput("list line without tab: " + line);
    add(line.substr(0, tab), line.substr(tab + 1));
  }
}

std::shared_ptr<ohd::SemanticPredicate> make_predicate(const PipelineConfig& cfg) {
  if (cfg.predicate_mode == "heuristic") {
    auto h = std::make_shared<ohd::HeuristicPredicate>();
    if (!cfg.allow_list.empty())
      load_pair_list(cfg.allow_list, [&](const std::string& p, const std::string& c) {
        h->allow(p, c);
      });
    if (!cfg.deny_list.empty())
      load_pair_list(cfg.deny_list, [&](const std::string& p, const std::string& c) {
        h->deny(p, c);
      });
    return h;
  }
  if (cfg.predicate_mode == "llm") {
    if (cfg.endpoint.empty()) throw CLI::ValidationError("--predicate llm requires --llm-endpoint");
    auto cached = std::make_shared<ohd::CachedPredicate>(
        std::make_shared<ohd::RemotePredicate>(endpoint_config(cfg)));
    if (!cfg.cache_path.empty() && fs::exists(cfg.cache_path)) cached->load(cfg.cache_path);
    return cached;
  }
  if (cfg.predicate_mode == "cached") {
    if (cfg.cache_path.empty()) throw CLI::ValidationError("--predicate cached requires --cache");
    auto cached = std::make_shared<ohd::CachedPredicate>(nullptr);
    cached->load(cfg.cache_path);
    return cached;
  }
  throw CLI::ValidationError("unknown predicate mode " + cfg.predicate_mode);
}

std::vector<fs::path> input_tables(const PipelineConfig& cfg) {
  fs::path p(cfg.input);
  if (fs::is_directory(p)) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(p))
      if (e.path().extension() == ".json" && e.path().string().find(".tree.") == std::string::npos)
        out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
  }
  return {p};
}

fs::path out_path(const PipelineConfig& cfg, const fs::path& input, const std::string& suffix) {
  fs::path dir = cfg.out_dir.empty() ? input.parent_path() : fs::path(cfg.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  std::string stem = input.stem().string();
  return dir / (stem + suffix);
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  if (n == 0) return;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ohd::TableFormat detect_format(const fs::path& p) {
  return p.extension() == ".html" || p.extension() == ".htm" ? ohd::TableFormat::Html
                                                             : ohd::TableFormat::Json;
}

void cmd_induce(const PipelineConfig& cfg) {
  auto pred = make_predicate(cfg);
  auto inputs = input_tables(cfg);
  parallel_for(inputs.size(), cfg.parallel, [&](std::size_t i) {
    const fs::path& in = inputs[i];
    ohd::Table t = ohd::parse_table(read_file(in.string()), detect_format(in));
    ohd::HierTree col = ohd::induce_tree(t, ohd::Axis::Column, *pred);
    ohd::HierTree row = ohd::induce_tree(t, ohd::Axis::Row, *pred);
    write_file(out_path(cfg, in, ".col.tree.json").string(), col.to_json());
    write_file(out_path(cfg, in, ".row.tree.json").string(), row.to_json());
  });
  if (cfg.predicate_mode == "llm" && !cfg.cache_path.empty())
    std::static_pointer_cast<ohd::CachedPredicate>(pred)->save(cfg.cache_path);
}

void cmd_serialize(const PipelineConfig& cfg) {
  auto inputs = input_tables(cfg);
  parallel_for(inputs.size(), cfg.parallel, [&](std::size_t i) {
    const fs::path& in = inputs[i];
    ohd::Table t = ohd::parse_table(read_file(in.string()), detect_format(in));
    ohd::HierTree col =
        ohd::HierTree::from_json(read_file(out_path(cfg, in, ".col.tree.json").string()));
    ohd::HierTree row =
        ohd::HierTree::from_json(read_file(out_path(cfg, in, ".row.tree.json").string()));
    ohd::Representation r_col = ohd::reconstruct(t, col, row, ohd::Axis::Column);
    ohd::Representation r_row = ohd::reconstruct(t, col, row, ohd::Axis::Row);
    write_file(out_path(cfg, in, ".col.rep.txt").string(), ohd::representation_to_text(r_col));
    write_file(out_path(cfg, in, ".row.rep.txt").string(), ohd::representation_to_text(r_row));
    write_file(out_path(cfg, in, ".col.rep.json").string(), ohd::representation_to_json(r_col));
    write_file(out_path(cfg, in, ".row.rep.json").string(), ohd::representation_to_json(r_row));
  });
}

std::string final_representation(const PipelineConfig& cfg, const std::string& r_col_text,
                                 const std::string& r_row_text, const std::string& table_id,
                                 ohd::AuditLog* audit) {
  if (cfg.offline) return ohd::offline_merge(r_col_text, r_row_text);
  std::string prompt = ohd::build_arbitration_prompt(r_col_text, r_row_text);
  auto start = std::chrono::steady_clock::now();
  std::string response = ohd::chat_completion(endpoint_config(cfg), prompt);
  auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  if (audit) audit->record(table_id, prompt, response, latency);
  return response;
}

void cmd_arbitrate(const PipelineConfig& cfg) {
  auto inputs = input_tables(cfg);
  ohd::AuditLog audit(cfg.out_dir.empty() ? "arbitration_audit.jsonl"
                                          : (fs::path(cfg.out_dir) / "arbitration_audit.jsonl")
                                                .string());
  parallel_for(inputs.size(), cfg.parallel, [&](std::size_t i) {
    const fs::path& in = inputs[i];
    std::string r_col = read_file(out_path(cfg, in, ".col.rep.txt").string());
    std::string r_row = read_file(out_path(cfg, in, ".row.rep.txt").string());
    std::string final_text;
    try {
      final_text =
          final_representation(cfg, r_col, r_row, in.stem().string(), cfg.offline ? nullptr : &audit);
    } catch (const ohd::Error& e) {
      throw ohd::ArbitrationUnavailable(e.what());
    }
    write_file(out_path(cfg, in, ".final.txt").string(), final_text);
  });
}

void cmd_qa(const PipelineConfig& cfg, const std::string& question) {
  auto pred = make_predicate(cfg);
  fs::path in(cfg.input);
  ohd::Table t = ohd::parse_table(read_file(in.string()), detect_format(in));
  ohd::HierTree col = ohd::induce_tree(t, ohd::Axis::Column, *pred);
  ohd::HierTree row = ohd::induce_tree(t, ohd::Axis::Row, *pred);
  ohd::Representation r_col = ohd::reconstruct(t, col, row, ohd::Axis::Column);
  ohd::Representation r_row = ohd::reconstruct(t, col, row, ohd::Axis::Row);
  std::string s_final = cfg.offline
                            ? ohd::offline_merge(r_col, r_row)
                            : final_representation(cfg, ohd::representation_to_text(r_col),
                                                   ohd::representation_to_text(r_row),
                                                   in.stem().string(), nullptr);
  if (cfg.offline) {
    std::cout << s_final << "\n[offline mode: no model was invoked; the merged views above "
                            "stand in for an answer to \"" +
                     question + "\"]\n";
    return;
  }
  std::string prompt = s_final + "\n\nQuestion: " + question + "\nAnswer:";
  std::cout << ohd::chat_completion(endpoint_config(cfg), prompt) << "\n";
}

void cmd_eval(const PipelineConfig& cfg) {
  std::ifstream in(cfg.input);
  if (!in) throw std::ios_base::failure("cannot read " + cfg.input);
  std::vector<ohd::QAPair> pairs = ohd::load_qa_pairs(in);
  std::vector<ohd::Judge> judges;
  if (cfg.offline || cfg.endpoint.empty()) {
    // the local comparator alone: remote-undecidable pairs score 0
    judges.push_back(ohd::Judge{"local", [](const std::string&) { return std::string("0"); }});
  } else {
    judges.push_back(ohd::remote_judge(cfg.model.empty() ? "judge" : cfg.model,
                                       endpoint_config(cfg)));
  }
  ohd::EvalReport report = ohd::llm_eval(pairs, judges);
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_file((fs::path(cfg.out_dir) / "report.json").string(), ohd::report_to_json(report));
    write_file((fs::path(cfg.out_dir) / "report.txt").string(), ohd::report_to_text(report));
  }
  std::cout << ohd::report_to_text(report);
}

void cmd_generate(const PipelineConfig& cfg, ohd::GenSpec spec, int count) {
  fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    spec.seed = cfg.seed + static_cast<std::uint64_t>(i);
    ohd::GeneratedTable gen = ohd::generate(spec);
    std::string stem = "gen" + std::to_string(spec.seed);
    write_file((dir / (stem + ".table.json")).string(), ohd::export_table(gen.table));
    write_file((dir / (stem + ".col.tree.json")).string(), gen.truth_col.to_json());
    write_file((dir / (stem + ".row.tree.json")).string(), gen.truth_row.to_json());
    // record every judgment the pipeline needs so induction replays offline
    auto cached = std::make_shared<ohd::CachedPredicate>(gen.truth_pred);
    ohd::induce_tree(gen.table, ohd::Axis::Column, *cached);
    ohd::induce_tree(gen.table, ohd::Axis::Row, *cached);
    cached->save((dir / (stem + ".cache")).string());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal hierarchical decomposition of complex tables"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  app.add_option("--predicate", cfg.predicate_mode, "heuristic|llm|cached")
      ->check(CLI::IsMember({"heuristic", "llm", "cached"}));
  app.add_option("--cache", cfg.cache_path, "predicate cache file");
  app.add_option("--llm-endpoint", cfg.endpoint, "chat-completion endpoint URL");
  app.add_option("--model", cfg.model, "model name");
  app.add_option("--primary-axis", cfg.primary_axis, "column|row")
      ->check(CLI::IsMember({"column", "row"}));
  app.add_option("--input", cfg.input, "input file or directory");
  app.add_option("--out-dir", cfg.out_dir, "output directory");
  app.add_option("--allow-list", cfg.allow_list, "tab-separated parent/child pairs to accept");
  app.add_option("--deny-list", cfg.deny_list, "tab-separated parent/child pairs to reject");
  app.add_flag("--offline", cfg.offline, "never touch the network");
  app.add_option("--parallel", cfg.parallel, "max concurrent tables");
  app.add_option("--seed", cfg.seed, "generator seed");

  auto* induce = app.add_subcommand("induce", "induce column and row trees for tables");
  auto* serialize = app.add_subcommand("serialize", "emit R_col / R_row representations");
  auto* arbitrate = app.add_subcommand("arbitrate", "merge representations into S_final");
  auto* qa = app.add_subcommand("qa", "answer one question about a table");
  std::string question;
  qa->add_option("--question", question, "question text")->required();
  auto* eval = app.add_subcommand("eval", "score a predictions file");
  auto* generate = app.add_subcommand("generate", "emit a synthetic corpus with ground truth");
  ohd::GenSpec spec;
  int count = 1;
  generate->add_option("--count", count, "number of tables");
  generate->add_option("--max-col-depth", spec.max_col_depth);
  generate->add_option("--max-row-depth", spec.max_row_depth);
  generate->add_option("--min-data-rows", spec.min_data_rows);
  generate->add_option("--max-data-rows", spec.max_data_rows);
  generate->add_option("--min-data-cols", spec.min_data_cols);
  generate->add_option("--max-data-cols", spec.max_data_cols);
  generate->add_flag("--conflict", spec.conflict_headers);
  generate->add_flag("--merged", spec.merged_data);
  generate->add_flag("--headerless", spec.headerless_regions);
  generate->add_flag("--offset", spec.offset_headers);

  CLI11_PARSE(app, argc, argv);

  try {
    if (induce->parsed()) cmd_induce(cfg);
    else if (serialize->parsed()) cmd_serialize(cfg);
    else if (arbitrate->parsed()) cmd_arbitrate(cfg);
    else if (qa->parsed()) cmd_qa(cfg, question);
    else if (eval->parsed()) cmd_eval(cfg);
    else if (generate->parsed()) cmd_generate(cfg, spec, count);
  } catch (const ohd::PredicateUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ohd::ArbitrationUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ohd::JudgeUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ohd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
