#include "msrag/corpus/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msrag/corpus/html_to_markdown.hpp"
#include "msrag/corpus/tokenizer.hpp"
#include "msrag/errors.hpp"

namespace msrag::corpus {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

QueryRecord parse_query(const nlohmann::json& obj, const std::string& where) {
    QueryRecord q;
    try {
        q.id = obj.at("id").get<std::string>();
        q.text = obj.at("query").get<std::string>();
        q.domain = domain_from_string(obj.at("domain").get<std::string>());
        q.question_type = obj.at("question_type").get<std::string>();
        q.ground_truth = obj.at("ground_truth").get<std::string>();
        q.false_premise = obj.at("false_premise").get<bool>();
        for (const auto& ref : obj.at("web_refs")) q.web_refs.push_back(ref.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(where + ": " + e.what());
    }
    const auto& vocab = question_type_vocabulary();
    if (std::find(vocab.begin(), vocab.end(), q.question_type) == vocab.end())
        throw DatasetError(where + ": unknown question_type '" + q.question_type + "'");
    return q;
}

} // namespace

const MarkdownDocument& Dataset::doc(const std::string& id) const {
    auto it = web_docs.find(id);
    if (it == web_docs.end()) throw DatasetError("unknown document id: '" + id + "'");
    return it->second;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto queries_file = dir / "queries.jsonl";
    const auto web_dir = dir / "web";
    const auto kg_file = dir / "kg.jsonl";
    if (!std::filesystem::exists(queries_file))
        throw DatasetError("missing file: " + queries_file.string());
    if (!std::filesystem::exists(web_dir))
        throw DatasetError("missing directory: " + web_dir.string());
    if (!std::filesystem::exists(kg_file)) throw DatasetError("missing file: " + kg_file.string());

    Dataset ds;

    // Web corpus first, in sorted filename order to keep loading stable.
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(web_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const std::string ext = file.extension().string();
        if (ext != ".html" && ext != ".md") continue;
        MarkdownDocument doc;
        doc.id = file.stem().string();
        if (ext == ".html") {
            MarkdownConversion converted = convert_html_to_markdown(read_file(file));
            doc.text = std::move(converted.text);
            if (!converted.title.empty()) doc.metadata["title"] = converted.title;
        } else {
            doc.text = sanitize_utf8(read_file(file));
        }
        doc.token_count = tokenize(doc.text).size();
        if (ds.web_docs.count(doc.id) != 0)
            throw DatasetError("duplicate web document id: '" + doc.id + "'");
        ds.doc_order.push_back(doc.id);
        ds.web_docs.emplace(doc.id, std::move(doc));
    }

    std::ifstream in(queries_file);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = queries_file.string() + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(where + ": " + e.what());
        }
        QueryRecord q = parse_query(obj, where);
        for (const std::string& ref : q.web_refs) {
            if (ds.web_docs.count(ref) == 0)
                throw DatasetError(where + ": query '" + q.id + "' references missing document '" + ref + "'");
        }
        ds.queries.push_back(std::move(q));
    }

    ds.kg = structured::load_kg(kg_file);
    return ds;
}

} // namespace msrag::corpus
