#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "msrag/corpus/html_to_markdown.hpp"
#include "msrag/engine/engine.hpp"
#include "msrag/errors.hpp"
#include "msrag/router/routing_dataset.hpp"

namespace fs = std::filesystem;
using namespace msrag;

namespace {

struct RunFlags {
    std::string config_path;
    std::string dataset;
    std::string sources;
    std::string retrieval_mode;
    int chunk_size = -1;
    int chunk_overlap = -1;
    int top_k = -1;
    int sparse_m = -1;
    int few_shot = -1;
    int workers = -1;
    std::string cross_domain; // "true"/"false"
    std::string cot;
    std::string out_dir;
    std::string generator_kind;
    std::string generator_script;
};

void add_run_flags(CLI::App& app, RunFlags& f) {
    app.add_option("--config", f.config_path, "Config file (sectioned key=value)");
    app.add_option("--dataset", f.dataset, "Dataset directory");
    app.add_option("--sources", f.sources, "auto or comma-separated subset of internal,web,api");
    app.add_option("--retrieval", f.retrieval_mode, "sparse|dense|hybrid");
    app.add_option("--chunk-size", f.chunk_size, "Chunk size in tokens");
    app.add_option("--chunk-overlap", f.chunk_overlap, "Chunk overlap in tokens");
    app.add_option("--top-k", f.top_k, "Dense top-k chunks");
    app.add_option("--sparse-m", f.sparse_m, "Sparse stage document count M");
    app.add_option("--few-shot", f.few_shot, "Few-shot example count");
    app.add_option("--cross-domain", f.cross_domain, "true|false: cross-domain few-shot selection");
    app.add_option("--cot", f.cot, "true|false: chain-of-thought directive");
    app.add_option("--out", f.out_dir, "Output directory root");
    app.add_option("--workers", f.workers, "Worker thread cap");
    app.add_option("--generator", f.generator_kind, "echo|scripted|remote");
    app.add_option("--generator-script", f.generator_script, "Script file for the scripted generator");
}

bool parse_bool(const std::string& v, const char* flag) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(std::string(flag) + " expects true or false, got '" + v + "'");
}

engine::RunConfig make_config(const RunFlags& f) {
    engine::RunConfig cfg;
    if (!f.config_path.empty()) cfg = engine::load_run_config(f.config_path);
    if (!f.dataset.empty()) cfg.dataset_path = f.dataset;
    if (!f.sources.empty()) cfg.sources = f.sources;
    if (!f.retrieval_mode.empty()) cfg.retrieval.mode = retrieval::mode_from_string(f.retrieval_mode);
    if (f.chunk_size >= 0) cfg.chunking.size = static_cast<std::size_t>(f.chunk_size);
    if (f.chunk_overlap >= 0) cfg.chunking.overlap = static_cast<std::size_t>(f.chunk_overlap);
    if (f.top_k >= 0) cfg.retrieval.dense_chunk_count = static_cast<std::size_t>(f.top_k);
    if (f.sparse_m >= 0) cfg.retrieval.sparse_doc_count = static_cast<std::size_t>(f.sparse_m);
    if (f.few_shot >= 0) cfg.prompt.n_examples = f.few_shot;
    if (!f.cross_domain.empty()) cfg.prompt.cross_domain = parse_bool(f.cross_domain, "--cross-domain");
    if (!f.cot.empty()) cfg.prompt.cot_enabled = parse_bool(f.cot, "--cot");
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.workers >= 0) cfg.workers = f.workers;
    if (!f.generator_kind.empty()) cfg.generator_kind = f.generator_kind;
    if (!f.generator_script.empty()) cfg.generator_script = f.generator_script;
    return cfg;
}

int cmd_run(const RunFlags& flags) {
    engine::Engine eng(make_config(flags));
    auto result = eng.run_dataset(true);
    std::cout << eval::report_table(result.report);
    std::cout << "outputs: " << result.output_dir.string() << "\n";
    return 0;
}

int cmd_sweep(const RunFlags& flags, const std::string& axis, const std::string& values_csv) {
    std::vector<std::string> values;
    std::string cur;
    for (char c : values_csv) {
        if (c == ',') {
            if (!cur.empty()) values.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) values.push_back(cur);
    if (values.empty()) throw ConfigError("--values requires at least one value");
    auto sweep = engine::run_sweep(make_config(flags), axis, values, true);
    std::cout << engine::sweep_summary_table(sweep);
    return 0;
}

int cmd_build_routing_data(const std::string& outcomes_path, const std::string& out_path) {
    auto outcomes = router::load_outcomes(outcomes_path);
    auto examples = router::build_routing_dataset(outcomes);
    router::export_finetune_file(examples, out_path);
    std::cout << "wrote " << examples.size() << " routing examples to " << out_path << "\n";
    return 0;
}

int cmd_ingest(const std::string& html_dir, const std::string& out_dir) {
    if (!fs::is_directory(html_dir)) throw ConfigError("--html-dir is not a directory: " + html_dir);
    fs::create_directories(out_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(html_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".html") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::string html((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto converted = corpus::convert_html_to_markdown(html);
        fs::path target = fs::path(out_dir) / file.filename().replace_extension(".md");
        std::ofstream out(target, std::ios::binary);
        out << converted.text;
    }
    std::cout << "converted " << files.size() << " files into " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"msrag: multi-source retrieval-augmented generation engine"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the full pipeline over a dataset");
    add_run_flags(*run, run_flags);

    RunFlags sweep_flags;
    std::string axis, values_csv;
    auto* sweep = app.add_subcommand("sweep", "Run one experiment per swept value");
    add_run_flags(*sweep, sweep_flags);
    sweep->add_option("--axis", axis, "chunk_size|chunk_overlap|top_k|few_shot_n|sources|retrieval_mode")
        ->required();
    sweep->add_option("--values", values_csv, "Comma-separated values for the axis")->required();

    std::string outcomes_path, routing_out;
    auto* brd = app.add_subcommand("build-routing-data", "Label queries with answering sources");
    brd->add_option("--outcomes", outcomes_path, "Outcome table (JSONL)")->required();
    brd->add_option("--out", routing_out, "Output fine-tune file (JSONL)")->required();

    std::string html_dir, ingest_out;
    auto* ingest = app.add_subcommand("ingest", "Convert a directory of HTML files to Markdown");
    ingest->add_option("--html-dir", html_dir, "Directory of .html files")->required();
    ingest->add_option("--out", ingest_out, "Output directory for .md files")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(run_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, axis, values_csv);
        if (brd->parsed()) return cmd_build_routing_data(outcomes_path, routing_out);
        if (ingest->parsed()) return cmd_ingest(html_dir, ingest_out);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
