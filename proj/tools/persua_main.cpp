// persua: persuasion-detection pipeline over sentence corpora and ad libraries.
// Subcommands chain into each other through files, never shared state, so any
// stage can be rerun in isolation. Reruns with equal inputs and config write
// byte-identical outputs.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "persua/analytics.hpp"
#include "persua/corpus.hpp"
#include "persua/error.hpp"
#include "persua/features.hpp"
#include "persua/metrics.hpp"
#include "persua/model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- run configuration --------------------------------------------------

// Everything a run depends on besides its input files. Serializable so a
// saved config reproduces the run; hashed so every report can say which
// config produced it.
struct RunConfig {
    std::uint64_t seed = 7;
    persua::PrepConfig prep;
    std::string stopword_file;  // overrides the built-in list when set
    std::uint32_t min_df = 1;
    std::string idf = "smoothed";  // or "raw"
    double learning_rate = 2.0;
    std::size_t epochs = 300;
    double beta = -1.0;  // negative: derive from the class balance
    double eps = 1e-7;
    double threshold = 0.5;
    double bucket_low = 0.2;
    double bucket_high = 0.8;
    std::size_t window = 3;
    double alpha = 0.05;
    std::size_t top_k = 10;
    std::string quantity = "spend";      // or "impressions"
    std::string attribution = "active";  // or "created"
    std::string bigram_order = "after";  // count bigrams after/before stopword removal

    json to_json() const;
    static RunConfig from_json(const json& j, const std::string& where);

    persua::IdfVariant idf_variant() const {
        if (idf == "smoothed") return persua::IdfVariant::smoothed;
        if (idf == "raw") return persua::IdfVariant::raw;
        throw persua::ValidationError("idf must be 'smoothed' or 'raw', got '" + idf + "'");
    }
    persua::AdQuantity ad_quantity() const {
        if (quantity == "spend") return persua::AdQuantity::spend;
        if (quantity == "impressions") return persua::AdQuantity::impressions;
        throw persua::ValidationError("quantity must be 'spend' or 'impressions', got '" +
                                      quantity + "'");
    }
    persua::AttributionMode attribution_mode() const {
        if (attribution == "active") return persua::AttributionMode::active_days;
        if (attribution == "created") return persua::AttributionMode::creation_day;
        throw persua::ValidationError("attribution must be 'active' or 'created', got '" +
                                      attribution + "'");
    }
    void check_enums() const {
        idf_variant();
        ad_quantity();
        attribution_mode();
        if (bigram_order != "after" && bigram_order != "before")
            throw persua::ValidationError("bigram-order must be 'after' or 'before', got '" +
                                          bigram_order + "'");
    }

    // FNV-1a over the canonical JSON dump (object keys are sorted).
    std::string hash() const {
        const std::string dump = to_json().dump();
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : dump) {
            h ^= c;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
        return buf;
    }
};

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["prep"] = json::parse(prep.to_json());
    j["stopword_file"] = stopword_file;
    j["min_df"] = min_df;
    j["idf"] = idf;
    j["learning_rate"] = learning_rate;
    j["epochs"] = epochs;
    j["beta"] = beta;
    j["eps"] = eps;
    j["threshold"] = threshold;
    j["bucket_low"] = bucket_low;
    j["bucket_high"] = bucket_high;
    j["window"] = window;
    j["alpha"] = alpha;
    j["top_k"] = top_k;
    j["quantity"] = quantity;
    j["attribution"] = attribution;
    j["bigram_order"] = bigram_order;
    return j;
}

RunConfig RunConfig::from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw persua::ParseError("config must be a JSON object: " + where);
    static const std::set<std::string> known = {
        "seed",      "prep",         "stopword_file", "min_df",     "idf",
        "learning_rate", "epochs",   "beta",          "eps",        "threshold",
        "bucket_low", "bucket_high", "window",        "alpha",      "top_k",
        "quantity",  "attribution",  "bigram_order",
    };
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw persua::ParseError("unknown config key '" + key + "' in " + where);

    RunConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("prep")) cfg.prep = persua::PrepConfig::from_json(j["prep"].dump());
        if (j.contains("stopword_file")) cfg.stopword_file = j["stopword_file"].get<std::string>();
        if (j.contains("min_df")) cfg.min_df = j["min_df"].get<std::uint32_t>();
        if (j.contains("idf")) cfg.idf = j["idf"].get<std::string>();
        if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("epochs")) cfg.epochs = j["epochs"].get<std::size_t>();
        if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
        if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
        if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
        if (j.contains("bucket_low")) cfg.bucket_low = j["bucket_low"].get<double>();
        if (j.contains("bucket_high")) cfg.bucket_high = j["bucket_high"].get<double>();
        if (j.contains("window")) cfg.window = j["window"].get<std::size_t>();
        if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("top_k")) cfg.top_k = j["top_k"].get<std::size_t>();
        if (j.contains("quantity")) cfg.quantity = j["quantity"].get<std::string>();
        if (j.contains("attribution")) cfg.attribution = j["attribution"].get<std::string>();
        if (j.contains("bigram_order")) cfg.bigram_order = j["bigram_order"].get<std::string>();
    } catch (const json::exception& e) {
        throw persua::ParseError("bad config value in " + where + ": " + e.what());
    }
    return cfg;
}

// ---- small file helpers --------------------------------------------------

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw persua::IoError("cannot create output directory " + dir + ": " + ec.message());
}

void ensure_parent_dir(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec)
        throw persua::IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw persua::IoError("cannot write " + path);
    out << content;
    if (!out) throw persua::IoError("write failed for " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw persua::IoError("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::parse_error& e) {
        throw persua::ParseError("bad JSON in " + path + ": " + e.what());
    }
}

// option override: the config file sets the baseline, explicit flags win
template <typename T>
void override_if_set(CLI::Option* opt, T& dst, const T& flag_value) {
    if (opt && opt->count() > 0) dst = flag_value;
}

// ---- shared pipeline pieces ----------------------------------------------

persua::PrepConfig resolved_prep(const RunConfig& cfg) {
    persua::PrepConfig prep = cfg.prep;
    if (!cfg.stopword_file.empty()) prep.stopword_list = persua::load_stopwords(cfg.stopword_file);
    return prep;
}

std::string sentence_key(const persua::LabeledSentence& s) {
    return s.doc_id + "#" + std::to_string(s.sentence_id);
}

persua::Matrix multilabel_truth(const std::vector<persua::LabeledSentence>& sentences,
                                const persua::LabelSchema& schema) {
    persua::Matrix truth(sentences.size(), schema.size());
    for (std::size_t i = 0; i < sentences.size(); ++i)
        for (auto label : sentences[i].labels) truth(i, label) = 1.0;
    return truth;
}

persua::Matrix binary_truth(const std::vector<persua::LabeledSentence>& sentences) {
    persua::Matrix truth(sentences.size(), 1);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (!sentences[i].binary)
            throw persua::ValidationError("sentence " + sentence_key(sentences[i]) +
                                          " has no binary label; run ingest --binarize first");
        truth(i, 0) = *sentences[i].binary == persua::BinaryLabel::persuasive ? 1.0 : 0.0;
    }
    return truth;
}

std::vector<std::string> texts_of(const std::vector<persua::LabeledSentence>& sentences) {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(s.text);
    return out;
}

struct ModelBundle {
    persua::LinearModel model;
    persua::Featurizer featurizer;
    bool binary_task = false;
};

ModelBundle load_model_dir(const std::string& dir) {
    ModelBundle bundle;
    bundle.model = persua::load_model(dir + "/model.json");
    bundle.featurizer = persua::load_featurizer(dir + "/featurizer.json");
    if (bundle.model.vocab_hash != bundle.featurizer.vocab.hash())
        throw persua::ValidationError(
            "model.json and featurizer.json in " + dir +
            " disagree on the vocabulary; they come from different runs");
    if (bundle.model.dim != bundle.featurizer.vocab.size())
        throw persua::ValidationError("model dimension does not match featurizer vocabulary");
    bundle.binary_task = bundle.model.labels.size() == 1;
    return bundle;
}

std::string format_double(double v, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

// ---- subcommand implementations -------------------------------------------

int cmd_synth(const RunConfig& cfg, const std::string& out_dir, std::size_t n_docs,
              std::size_t sentences_per_doc, std::size_t n_labels, double prior,
              std::size_t n_ads, const std::string& window_start,
              const std::string& window_end, double high_fraction, double low_fraction) {
    ensure_out_dir(out_dir);

    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_labels; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "label-%02zu", k);
        names.emplace_back(buf);
    }
    const auto schema = persua::LabelSchema::from_names(names);
    schema.save(out_dir + "/schema.json");

    const std::vector<double> priors(n_labels, prior);
    const auto sentences =
        persua::generate_synthetic(n_docs, sentences_per_doc, priors, cfg.seed);
    persua::save_sentences(out_dir + "/sentences.jsonl", sentences, schema);

    persua::SyntheticAdsConfig ads_cfg;
    ads_cfg.n_ads = n_ads;
    ads_cfg.n_labels = n_labels;
    ads_cfg.window_start = persua::Date::parse_iso(window_start);
    ads_cfg.window_end = persua::Date::parse_iso(window_end);
    ads_cfg.high_fraction = high_fraction;
    ads_cfg.low_fraction = low_fraction;
    // distinct stream from the sentence corpus, still a pure function of --seed
    const auto ads = persua::generate_synthetic_ads(ads_cfg, cfg.seed + 1);
    persua::save_ads(out_dir + "/ads.csv", ads);

    json manifest;
    manifest["config_hash"] = cfg.hash();
    manifest["seed"] = cfg.seed;
    manifest["n_docs"] = n_docs;
    manifest["n_sentences"] = sentences.size();
    manifest["n_labels"] = n_labels;
    manifest["label_prior"] = prior;
    manifest["n_ads"] = ads.size();
    manifest["ad_window"] = {{"start", window_start}, {"end", window_end}};
    write_json(out_dir + "/synth_manifest.json", manifest);

    std::cout << "wrote " << sentences.size() << " sentences (" << n_docs << " docs, "
              << n_labels << " labels) and " << ads.size() << " ads to " << out_dir << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& cfg, const std::string& sentences_path,
               const std::string& schema_path, const std::string& out_path,
               bool do_binarize) {
    const auto schema = persua::LabelSchema::load(schema_path);
    auto sentences = persua::load_sentences(sentences_path, schema);
    if (sentences.empty()) throw persua::ValidationError("corpus is empty: " + sentences_path);
    if (do_binarize) sentences = persua::binarize(sentences);
    ensure_parent_dir(out_path);
    persua::save_sentences(out_path, sentences, schema);

    std::set<std::string> docs;
    std::size_t labeled = 0, persuasive = 0, neutral = 0, with_binary = 0;
    for (const auto& s : sentences) {
        docs.insert(s.doc_id);
        if (!s.labels.empty()) ++labeled;
        if (s.binary) {
            ++with_binary;
            (*s.binary == persua::BinaryLabel::persuasive ? persuasive : neutral) += 1;
        }
    }
    std::cout << "sentences: " << sentences.size() << "\n"
              << "documents: " << docs.size() << "\n"
              << "with technique labels: " << labeled << "\n";
    if (with_binary > 0)
        std::cout << "binary: " << persuasive << " persuasive / " << neutral << " neutral\n";
    if (labeled > 0)
        std::cout << "avg techniques per document: "
                  << format_double(persua::avg_techniques_per_doc(sentences), 2) << "\n";
    std::cout << "config " << cfg.hash() << "; wrote " << out_path << "\n";
    return 0;
}

int cmd_split(const RunConfig& cfg, const std::string& sentences_path,
              const std::string& schema_path, const std::string& out_dir,
              double test_fraction) {
    const auto schema = persua::LabelSchema::load(schema_path);
    const auto sentences = persua::load_sentences(sentences_path, schema);
    const auto split = persua::stratified_split(sentences, test_fraction, cfg.seed);

    ensure_out_dir(out_dir);
    persua::save_sentences(out_dir + "/train.jsonl", split.train, schema);
    persua::save_sentences(out_dir + "/test.jsonl", split.test, schema);

    auto ids = [](const std::vector<persua::LabeledSentence>& part) {
        json arr = json::array();
        for (const auto& s : part) arr.push_back(sentence_key(s));
        return arr;
    };
    auto persuasive_count = [](const std::vector<persua::LabeledSentence>& part) {
        std::size_t n = 0;
        for (const auto& s : part)
            if (s.binary && *s.binary == persua::BinaryLabel::persuasive) ++n;
        return n;
    };
    json manifest;
    manifest["config_hash"] = cfg.hash();
    manifest["seed"] = cfg.seed;
    manifest["test_fraction"] = test_fraction;
    manifest["train_count"] = split.train.size();
    manifest["test_count"] = split.test.size();
    manifest["train_persuasive"] = persuasive_count(split.train);
    manifest["test_persuasive"] = persuasive_count(split.test);
    manifest["train_ids"] = ids(split.train);
    manifest["test_ids"] = ids(split.test);
    write_json(out_dir + "/split_manifest.json", manifest);

    std::cout << "train " << split.train.size() << " / test " << split.test.size()
              << " (seed " << cfg.seed << ", fraction " << test_fraction << ")\n"
              << "wrote train.jsonl, test.jsonl, split_manifest.json to " << out_dir << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& train_path,
              const std::string& schema_path, const std::string& out_dir,
              const std::string& task) {
    if (task != "multilabel" && task != "binary")
        throw persua::ValidationError("task must be 'multilabel' or 'binary', got '" + task +
                                      "'");
    const auto schema = persua::LabelSchema::load(schema_path);
    const auto sentences = persua::load_sentences(train_path, schema);
    if (sentences.empty()) throw persua::ValidationError("training corpus is empty");

    persua::Matrix truth;
    std::vector<std::string> labels;
    if (task == "binary") {
        truth = binary_truth(sentences);
        labels = persua::LabelSchema::binary().names;
    } else {
        truth = multilabel_truth(sentences, schema);
        labels = schema.names;
    }

    const auto prep = resolved_prep(cfg);
    const auto texts = texts_of(sentences);
    const auto featurizer =
        persua::Featurizer::fit(texts, prep, cfg.min_df, cfg.idf_variant());
    if (featurizer.vocab.size() == 0)
        throw persua::ValidationError(
            "vocabulary is empty after preprocessing; lower min_df or relax the prep config");
    const auto features = featurizer.transform_all(texts);

    persua::TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.epochs = cfg.epochs;
    tc.eps = cfg.eps;
    tc.beta = cfg.beta;
    const auto result = persua::train(features, truth, labels, featurizer.vocab.hash(), tc);

    ensure_out_dir(out_dir);
    persua::save_model(out_dir + "/model.json", result.model);
    persua::save_featurizer(out_dir + "/featurizer.json", featurizer);

    json log;
    log["config_hash"] = cfg.hash();
    log["task"] = task;
    log["beta"] = result.beta;
    log["learning_rate"] = cfg.learning_rate;
    log["epochs"] = cfg.epochs;
    log["vocab_size"] = featurizer.vocab.size();
    log["instances"] = sentences.size();
    log["final_loss"] = result.loss_history.back();
    log["loss_history"] = result.loss_history;
    write_json(out_dir + "/trainlog.json", log);

    std::cout << "trained " << task << " model on " << sentences.size() << " sentences ("
              << featurizer.vocab.size() << " terms, beta "
              << format_double(result.beta, 4) << ")\n"
              << "final loss " << result.loss_history.back() << " after " << cfg.epochs
              << " epochs\n"
              << "wrote model.json, featurizer.json, trainlog.json to " << out_dir << "\n";
    return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& sentences_path,
                  const std::string& schema_path, const std::string& model_dir,
                  const std::string& out_dir) {
    const auto schema = persua::LabelSchema::load(schema_path);
    const auto sentences = persua::load_sentences(sentences_path, schema);
    if (sentences.empty()) throw persua::ValidationError("calibration corpus is empty");
    const auto bundle = load_model_dir(model_dir);

    persua::Matrix truth;
    if (bundle.binary_task) {
        truth = binary_truth(sentences);
    } else {
        if (bundle.model.labels != schema.names)
            throw persua::ValidationError(
                "model labels do not match the schema; pass the schema the model was trained "
                "with");
        truth = multilabel_truth(sentences, schema);
    }
    const auto probs =
        persua::predict_proba(bundle.model, bundle.featurizer.transform_all(texts_of(sentences)));
    const auto calibration = persua::calibrate(truth, probs);

    ensure_out_dir(out_dir);
    std::ostringstream csv;
    csv << "tau,f1_micro,f1_macro\n";
    for (const auto& pt : calibration.points)
        csv << format_double(pt.tau, 2) << "," << pt.f1_micro << "," << pt.f1_macro << "\n";
    write_text(out_dir + "/calibration.csv", csv.str());

    json j;
    j["config_hash"] = cfg.hash();
    j["recommended"] = calibration.recommended;
    json points = json::array();
    for (const auto& pt : calibration.points)
        points.push_back(
            {{"tau", pt.tau}, {"f1_micro", pt.f1_micro}, {"f1_macro", pt.f1_macro}});
    j["points"] = std::move(points);
    write_json(out_dir + "/calibration.json", j);

    std::cout << "recommended threshold " << format_double(calibration.recommended, 2)
              << " over " << calibration.points.size() << " grid points\n"
              << "wrote calibration.csv, calibration.json to " << out_dir << "\n";
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& sentences_path,
                const std::string& schema_path, const std::string& model_dir,
                const std::string& out_path) {
    const auto schema = persua::LabelSchema::load(schema_path);
    const auto sentences = persua::load_sentences(sentences_path, schema);
    if (sentences.empty()) throw persua::ValidationError("prediction corpus is empty");
    const auto bundle = load_model_dir(model_dir);

    const auto probs =
        persua::predict_proba(bundle.model, bundle.featurizer.transform_all(texts_of(sentences)));
    const auto pred = persua::apply_threshold(probs, cfg.threshold);

    ensure_parent_dir(out_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw persua::IoError("cannot write " + out_path);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        json row;
        row["doc_id"] = sentences[i].doc_id;
        row["sentence_id"] = sentences[i].sentence_id;
        json prob_obj = json::object();
        json predicted = json::array();
        for (std::size_t j = 0; j < bundle.model.labels.size(); ++j) {
            prob_obj[bundle.model.labels[j]] = probs(i, j);
            if (pred(i, j) == 1.0) {
                predicted.push_back(bundle.model.labels[j]);
                ++positives;
            }
        }
        row["probs"] = std::move(prob_obj);
        row["predicted"] = std::move(predicted);
        out << row.dump() << "\n";
    }
    std::cout << sentences.size() << " sentences, " << positives
              << " positive label decisions at threshold "
              << format_double(cfg.threshold, 2) << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& sentences_path,
                 const std::string& schema_path, const std::string& model_dir,
                 const std::string& out_path) {
    const auto schema = persua::LabelSchema::load(schema_path);
    const auto sentences = persua::load_sentences(sentences_path, schema);
    if (sentences.empty()) throw persua::ValidationError("evaluation corpus is empty");
    const auto bundle = load_model_dir(model_dir);

    persua::Matrix truth;
    const persua::LabelSchema* report_schema = nullptr;
    if (bundle.binary_task) {
        truth = binary_truth(sentences);
        report_schema = &persua::LabelSchema::binary();
    } else {
        if (bundle.model.labels != schema.names)
            throw persua::ValidationError(
                "model labels do not match the schema; pass the schema the model was trained "
                "with");
        truth = multilabel_truth(sentences, schema);
        report_schema = &schema;
    }

    const auto probs =
        persua::predict_proba(bundle.model, bundle.featurizer.transform_all(texts_of(sentences)));
    const auto pred = persua::apply_threshold(probs, cfg.threshold);
    const auto report = persua::evaluate(truth, pred, *report_schema, bundle.binary_task);

    json j = json::parse(persua::to_json_string(report));
    j["config_hash"] = cfg.hash();
    j["threshold"] = cfg.threshold;
    write_json(out_path, j);

    std::cout << "f1_micro " << format_double(report.f1_micro, 4) << ", f1_macro "
              << format_double(report.f1_macro, 4);
    if (report.accuracy) std::cout << ", accuracy " << format_double(*report.accuracy, 4);
    std::cout << " at threshold " << format_double(cfg.threshold, 2) << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_score_ads(const RunConfig& cfg, const std::string& ads_path,
                  const std::string& model_dir, const std::string& out_path) {
    const auto ads = persua::load_ads(ads_path);
    if (ads.empty()) throw persua::ValidationError("ad corpus is empty: " + ads_path);
    const auto bundle = load_model_dir(model_dir);
    const auto result = persua::score_ads(ads, bundle.model, bundle.featurizer, cfg.threshold);
    ensure_parent_dir(out_path);
    persua::save_scored_ads(out_path, result.ads);

    if (result.skipped > 0)
        std::cerr << "warning: skipped " << result.skipped
                  << " ads with no sentences after splitting\n";
    std::cout << "scored " << result.ads.size() << " ads at sentence threshold "
              << format_double(cfg.threshold, 2) << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

json bucket_to_json(const persua::BucketStats& stats,
                    const std::optional<persua::LexicalProfile>& profile) {
    json j;
    j["count"] = stats.count;
    j["share"] = stats.share;
    j["total_spend_mid"] = stats.total_spend_mid;
    j["mean_spend_mid"] = stats.mean_spend_mid;
    j["mean_impressions_mid"] = stats.mean_impressions_mid;
    j["mean_duration_days"] = stats.mean_duration_days;
    j["top_funder"] = stats.top_funder;
    j["top_funder_spend"] = stats.top_funder_spend;
    json terms = json::array();
    json bigrams = json::array();
    if (profile) {
        for (const auto& [term, weight] : profile->top_terms)
            terms.push_back({{"term", term}, {"avg_tfidf", weight}});
        for (const auto& [bigram, count] : profile->top_bigrams)
            bigrams.push_back({{"bigram", bigram}, {"count", count}});
    }
    j["top_terms"] = std::move(terms);
    j["top_bigrams"] = std::move(bigrams);
    return j;
}

json trend_to_json(const persua::TrendResult& trend, double alpha) {
    json j;
    j["available"] = true;
    j["s"] = trend.s;
    j["var_s"] = trend.var_s;
    j["z"] = trend.z;
    j["p_value"] = trend.p_value;
    j["direction"] = trend.direction;
    j["significant"] = trend.p_value < alpha;
    return j;
}

json unavailable(const std::string& reason) {
    return json{{"available", false}, {"reason", reason}};
}

int cmd_analyze(const RunConfig& cfg, const std::string& scored_path,
                const std::string& ads_path, const std::string& model_dir,
                const std::string& out_dir) {
    std::vector<persua::ScoredAd> scored;
    std::size_t skipped = 0;
    if (!scored_path.empty()) {
        scored = persua::load_scored_ads(scored_path);
    } else {
        const auto ads = persua::load_ads(ads_path);
        if (ads.empty()) throw persua::ValidationError("ad corpus is empty: " + ads_path);
        const auto bundle = load_model_dir(model_dir);
        auto result = persua::score_ads(ads, bundle.model, bundle.featurizer, cfg.threshold);
        scored = std::move(result.ads);
        skipped = result.skipped;
        if (skipped > 0)
            std::cerr << "warning: skipped " << skipped
                      << " ads with no sentences after splitting\n";
    }
    if (scored.empty()) throw persua::ValidationError("no scored ads to analyze");

    const persua::BucketThresholds thresholds{cfg.bucket_low, cfg.bucket_high};
    const auto breakdown = persua::bucket_stats(scored, thresholds);

    // bucket membership drives both the lexical profiles and the time series
    std::vector<persua::ScoredAd> high_ads, low_ads;
    std::vector<std::string> high_texts, mid_texts, low_texts;
    for (const auto& s : scored) {
        switch (persua::bucket_of(s.score, thresholds)) {
            case persua::PersuasionBucket::high:
                high_ads.push_back(s);
                high_texts.push_back(s.ad.text);
                break;
            case persua::PersuasionBucket::mid:
                mid_texts.push_back(s.ad.text);
                break;
            case persua::PersuasionBucket::low:
                low_ads.push_back(s);
                low_texts.push_back(s.ad.text);
                break;
        }
    }

    const auto prep = resolved_prep(cfg);
    persua::PrepConfig bigram_prep = prep;
    if (cfg.bigram_order == "before") bigram_prep.remove_stopwords = false;

    auto profile_of = [&](const std::vector<std::string>& texts)
        -> std::optional<persua::LexicalProfile> {
        if (texts.empty()) return std::nullopt;
        persua::LexicalProfile profile =
            persua::lexical_profile(texts, prep, cfg.top_k, cfg.idf_variant());
        if (cfg.bigram_order == "before")
            profile.top_bigrams =
                persua::lexical_profile(texts, bigram_prep, cfg.top_k, cfg.idf_variant())
                    .top_bigrams;
        return profile;
    };
    const auto high_profile = profile_of(high_texts);
    const auto mid_profile = profile_of(mid_texts);
    const auto low_profile = profile_of(low_texts);

    ensure_out_dir(out_dir);

    json buckets;
    buckets["config_hash"] = cfg.hash();
    buckets["thresholds"] = {{"low", cfg.bucket_low}, {"high", cfg.bucket_high}};
    buckets["total"] = breakdown.total;
    buckets["skipped"] = skipped;
    buckets["high"] = bucket_to_json(breakdown.high, high_profile);
    buckets["mid"] = bucket_to_json(breakdown.mid, mid_profile);
    buckets["low"] = bucket_to_json(breakdown.low, low_profile);
    write_json(out_dir + "/buckets.json", buckets);

    json comparison;
    comparison["config_hash"] = cfg.hash();
    try {
        const auto metrics = persua::compare_buckets(breakdown);
        comparison["available"] = true;
        json rows = json::array();
        for (const auto& m : metrics)
            rows.push_back({{"name", m.name},
                            {"high", m.high_value},
                            {"low", m.low_value},
                            {"pct_difference", m.pct_difference}});
        comparison["metrics"] = std::move(rows);
    } catch (const persua::DegenerateInputError& e) {
        comparison["available"] = false;
        comparison["reason"] = e.what();
    }
    write_json(out_dir + "/comparison.json", comparison);

    // long-format time series: one row per (group, series, date)
    struct Group {
        const char* name;
        const std::vector<persua::ScoredAd>* ads;
    };
    const Group groups[] = {{"all", &scored}, {"high", &high_ads}, {"low", &low_ads}};

    std::ostringstream ts;
    ts << "group,series,date,value\n";
    json trends;
    trends["config_hash"] = cfg.hash();
    trends["alpha"] = cfg.alpha;
    trends["window"] = cfg.window;
    trends["quantity"] = cfg.quantity;
    trends["attribution"] = cfg.attribution;
    json trend_groups = json::object();
    for (const auto& group : groups) {
        if (group.ads->empty()) {
            trend_groups[group.name] = unavailable("no ads in this bucket");
            continue;
        }
        const auto series =
            persua::daily_series(*group.ads, cfg.ad_quantity(), cfg.attribution_mode());
        const auto smoothed = persua::moving_average(series.mean_mid, cfg.window);

        for (std::size_t d = 0; d < series.days.size(); ++d) {
            const std::string date = series.days[d].to_iso();
            ts << group.name << ",mean_mid," << date << "," << series.mean_mid[d] << "\n";
            ts << group.name << ",mean_lo," << date << "," << series.mean_lo[d] << "\n";
            ts << group.name << ",mean_hi," << date << "," << series.mean_hi[d] << "\n";
            ts << group.name << ",ad_count," << date << "," << series.ad_count[d] << "\n";
            ts << group.name << ",smoothed_mid," << date << "," << smoothed[d] << "\n";
        }

        json g;
        try {
            g["raw"] = trend_to_json(persua::mann_kendall(series.mean_mid), cfg.alpha);
            g["smoothed"] = trend_to_json(persua::mann_kendall(smoothed), cfg.alpha);
        } catch (const persua::ValidationError& e) {
            g["raw"] = unavailable(e.what());
            g["smoothed"] = unavailable(e.what());
        }
        try {
            const auto corr = persua::pearson(series.mean_mid, smoothed);
            g["raw_vs_smoothed"] = {{"available", true},
                                    {"r", corr.r},
                                    {"p_value", corr.p_value},
                                    {"n", corr.n}};
        } catch (const std::runtime_error& e) {
            g["raw_vs_smoothed"] = unavailable(e.what());
        }
        g["days"] = series.days.size();
        trend_groups[group.name] = std::move(g);
    }
    trends["groups"] = std::move(trend_groups);
    write_text(out_dir + "/timeseries.csv", ts.str());
    write_json(out_dir + "/trends.json", trends);

    // human-readable summary
    auto bucket_row = [&](const char* label, const persua::BucketStats& b) {
        std::cout << std::left << std::setw(26) << label << std::setw(16)
                  << (std::to_string(b.count) + " (" + format_double(b.share * 100.0, 1) + "%)")
                  << std::setw(16) << format_double(b.mean_impressions_mid, 1) << std::setw(12)
                  << format_double(b.mean_spend_mid, 1) << std::setw(10)
                  << format_double(b.mean_duration_days, 1)
                  << (b.top_funder.empty() ? "-" : b.top_funder) << "\n";
    };
    std::cout << "persuasion buckets (low <= " << format_double(cfg.bucket_low, 2)
              << ", high >= " << format_double(cfg.bucket_high, 2) << ", " << breakdown.total
              << " ads)\n";
    std::cout << std::left << std::setw(26) << "bucket" << std::setw(16) << "ads"
              << std::setw(16) << "impressions" << std::setw(12) << "spend" << std::setw(10)
              << "days"
              << "top funder\n";
    bucket_row("high persuasion", breakdown.high);
    bucket_row("mid persuasion", breakdown.mid);
    bucket_row("low persuasion", breakdown.low);
    if (comparison["available"].get<bool>()) {
        std::cout << "high vs low:";
        for (const auto& m : comparison["metrics"]) {
            const double pct = m["pct_difference"].get<double>();
            std::cout << " " << m["name"].get<std::string>() << " "
                      << (pct >= 0 ? "+" : "") << format_double(pct, 1) << "%";
        }
        std::cout << "\n";
    } else {
        std::cout << "high vs low comparison unavailable: "
                  << comparison["reason"].get<std::string>() << "\n";
    }
    for (const auto& group : groups) {
        const auto& g = trend_groups[group.name];
        if (!g.contains("smoothed") || !g["smoothed"]["available"].get<bool>()) continue;
        const auto& s = g["smoothed"];
        std::cout << group.name << " " << cfg.quantity << " trend (window " << cfg.window
                  << "): direction " << s["direction"].get<int>() << ", p "
                  << format_double(s["p_value"].get<double>(), 4)
                  << (s["significant"].get<bool>() ? " (significant at alpha "
                                                   : " (not significant at alpha ")
                  << format_double(cfg.alpha, 3) << ")\n";
    }
    std::cout << "wrote buckets.json, comparison.json, timeseries.csv, trends.json to "
              << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"persuasion-detection pipeline: corpora, classifier, ad analytics"};
    app.require_subcommand(1);

    int rc = 0;

    // synth ------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus and ad set");
    struct {
        std::string config, out_dir, window_start = "2022-03-01", window_end = "2022-06-18";
        std::uint64_t seed = 7;
        std::size_t docs = 200, sentences_per_doc = 10, labels = 5, ads = 200;
        double prior = 0.3, high_fraction = 0.45, low_fraction = 0.15;
    } sy;
    synth->add_option("--config", sy.config, "JSON run-config file; flags override it");
    synth->add_option("--out-dir", sy.out_dir, "output directory")->required();
    auto* sy_seed = synth->add_option("--seed", sy.seed, "generator seed");
    synth->add_option("--docs", sy.docs, "number of documents");
    synth->add_option("--sentences-per-doc", sy.sentences_per_doc, "sentences per document");
    synth->add_option("--labels", sy.labels, "number of labels");
    synth->add_option("--prior", sy.prior, "per-label planting probability");
    synth->add_option("--ads", sy.ads, "number of ads");
    synth->add_option("--window-start", sy.window_start, "ad window start (YYYY-MM-DD)");
    synth->add_option("--window-end", sy.window_end, "ad window end (YYYY-MM-DD)");
    synth->add_option("--high-fraction", sy.high_fraction, "share of high-persuasion ads");
    synth->add_option("--low-fraction", sy.low_fraction, "share of low-persuasion ads");
    synth->callback([&] {
        RunConfig cfg;
        if (!sy.config.empty()) cfg = RunConfig::from_json(read_json_file(sy.config), sy.config);
        override_if_set(sy_seed, cfg.seed, sy.seed);
        cfg.check_enums();
        rc = cmd_synth(cfg, sy.out_dir, sy.docs, sy.sentences_per_doc, sy.labels, sy.prior,
                       sy.ads, sy.window_start, sy.window_end, sy.high_fraction,
                       sy.low_fraction);
    });

    // ingest -----------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "validate a sentence corpus, optionally binarize");
    struct {
        std::string config, sentences, schema, out;
        bool binarize = false;
    } in;
    ingest->add_option("--config", in.config, "JSON run-config file; flags override it");
    ingest->add_option("--sentences", in.sentences, "input sentence JSONL")->required();
    ingest->add_option("--schema", in.schema, "label schema JSON")->required();
    ingest->add_option("--out", in.out, "output sentence JSONL")->required();
    ingest->add_flag("--binarize", in.binarize, "derive neutral/persuasive binary labels");
    ingest->callback([&] {
        RunConfig cfg;
        if (!in.config.empty()) cfg = RunConfig::from_json(read_json_file(in.config), in.config);
        cfg.check_enums();
        rc = cmd_ingest(cfg, in.sentences, in.schema, in.out, in.binarize);
    });

    // split ------------------------------------------------------------------
    auto* split = app.add_subcommand("split", "stratified train/test split by binary label");
    struct {
        std::string config, sentences, schema, out_dir;
        std::uint64_t seed = 7;
        double test_fraction = 0.25;
    } sp;
    split->add_option("--config", sp.config, "JSON run-config file; flags override it");
    split->add_option("--sentences", sp.sentences, "binarized sentence JSONL")->required();
    split->add_option("--schema", sp.schema, "label schema JSON")->required();
    split->add_option("--out-dir", sp.out_dir, "output directory")->required();
    auto* sp_seed = split->add_option("--seed", sp.seed, "shuffle seed");
    split->add_option("--test-fraction", sp.test_fraction, "test share in (0,1)");
    split->callback([&] {
        RunConfig cfg;
        if (!sp.config.empty()) cfg = RunConfig::from_json(read_json_file(sp.config), sp.config);
        override_if_set(sp_seed, cfg.seed, sp.seed);
        cfg.check_enums();
        rc = cmd_split(cfg, sp.sentences, sp.schema, sp.out_dir, sp.test_fraction);
    });

    // train ------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "fit the linear classifier");
    struct {
        std::string config, train_path, schema, out_dir, task = "multilabel", idf = "smoothed";
        double lr = 2.0, beta = -1.0;
        std::size_t epochs = 300;
        std::uint32_t min_df = 1;
    } tr;
    train->add_option("--config", tr.config, "JSON run-config file; flags override it");
    train->add_option("--train", tr.train_path, "training sentence JSONL")->required();
    train->add_option("--schema", tr.schema, "label schema JSON")->required();
    train->add_option("--out-dir", tr.out_dir, "model output directory")->required();
    train->add_option("--task", tr.task, "multilabel or binary");
    auto* tr_lr = train->add_option("--lr", tr.lr, "gradient descent learning rate");
    auto* tr_epochs = train->add_option("--epochs", tr.epochs, "training epochs");
    auto* tr_beta =
        train->add_option("--beta", tr.beta, "positive-class loss weight; negative = balanced");
    auto* tr_min_df = train->add_option("--min-df", tr.min_df, "vocabulary document-frequency floor");
    auto* tr_idf = train->add_option("--idf", tr.idf, "idf variant: smoothed or raw");
    train->callback([&] {
        RunConfig cfg;
        if (!tr.config.empty()) cfg = RunConfig::from_json(read_json_file(tr.config), tr.config);
        override_if_set(tr_lr, cfg.learning_rate, tr.lr);
        override_if_set(tr_epochs, cfg.epochs, tr.epochs);
        override_if_set(tr_beta, cfg.beta, tr.beta);
        override_if_set(tr_min_df, cfg.min_df, tr.min_df);
        override_if_set(tr_idf, cfg.idf, tr.idf);
        cfg.check_enums();
        rc = cmd_train(cfg, tr.train_path, tr.schema, tr.out_dir, tr.task);
    });

    // calibrate --------------------------------------------------------------
    auto* calibrate = app.add_subcommand("calibrate", "sweep thresholds on a dev set");
    struct {
        std::string config, sentences, schema, model_dir, out_dir;
    } ca;
    calibrate->add_option("--config", ca.config, "JSON run-config file; flags override it");
    calibrate->add_option("--sentences", ca.sentences, "dev sentence JSONL")->required();
    calibrate->add_option("--schema", ca.schema, "label schema JSON")->required();
    calibrate->add_option("--model-dir", ca.model_dir, "directory with model.json + featurizer.json")
        ->required();
    calibrate->add_option("--out-dir", ca.out_dir, "output directory")->required();
    calibrate->callback([&] {
        RunConfig cfg;
        if (!ca.config.empty()) cfg = RunConfig::from_json(read_json_file(ca.config), ca.config);
        cfg.check_enums();
        rc = cmd_calibrate(cfg, ca.sentences, ca.schema, ca.model_dir, ca.out_dir);
    });

    // predict ----------------------------------------------------------------
    auto* predict = app.add_subcommand("predict", "write per-sentence probabilities and labels");
    struct {
        std::string config, sentences, schema, model_dir, out;
        double threshold = 0.5;
    } pr;
    predict->add_option("--config", pr.config, "JSON run-config file; flags override it");
    predict->add_option("--sentences", pr.sentences, "input sentence JSONL")->required();
    predict->add_option("--schema", pr.schema, "label schema JSON")->required();
    predict->add_option("--model-dir", pr.model_dir, "directory with model.json + featurizer.json")
        ->required();
    predict->add_option("--out", pr.out, "output predictions JSONL")->required();
    auto* pr_tau = predict->add_option("--threshold", pr.threshold, "decision threshold");
    predict->callback([&] {
        RunConfig cfg;
        if (!pr.config.empty()) cfg = RunConfig::from_json(read_json_file(pr.config), pr.config);
        override_if_set(pr_tau, cfg.threshold, pr.threshold);
        cfg.check_enums();
        rc = cmd_predict(cfg, pr.sentences, pr.schema, pr.model_dir, pr.out);
    });

    // evaluate ---------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold labels");
    struct {
        std::string config, sentences, schema, model_dir, out;
        double threshold = 0.5;
    } ev;
    evaluate->add_option("--config", ev.config, "JSON run-config file; flags override it");
    evaluate->add_option("--sentences", ev.sentences, "gold sentence JSONL")->required();
    evaluate->add_option("--schema", ev.schema, "label schema JSON")->required();
    evaluate->add_option("--model-dir", ev.model_dir, "directory with model.json + featurizer.json")
        ->required();
    evaluate->add_option("--out", ev.out, "output report JSON")->required();
    auto* ev_tau = evaluate->add_option("--threshold", ev.threshold, "decision threshold");
    evaluate->callback([&] {
        RunConfig cfg;
        if (!ev.config.empty()) cfg = RunConfig::from_json(read_json_file(ev.config), ev.config);
        override_if_set(ev_tau, cfg.threshold, ev.threshold);
        cfg.check_enums();
        rc = cmd_evaluate(cfg, ev.sentences, ev.schema, ev.model_dir, ev.out);
    });

    // score-ads --------------------------------------------------------------
    auto* score = app.add_subcommand("score-ads", "persuasion-score an ad corpus");
    struct {
        std::string config, ads, model_dir, out;
        double threshold = 0.5;
    } sc;
    score->add_option("--config", sc.config, "JSON run-config file; flags override it");
    score->add_option("--ads", sc.ads, "ad CSV")->required();
    score->add_option("--model-dir", sc.model_dir,
                      "directory with a binary model.json + featurizer.json")
        ->required();
    score->add_option("--out", sc.out, "output scored-ad CSV")->required();
    auto* sc_tau = score->add_option("--threshold", sc.threshold, "per-sentence threshold");
    score->callback([&] {
        RunConfig cfg;
        if (!sc.config.empty()) cfg = RunConfig::from_json(read_json_file(sc.config), sc.config);
        override_if_set(sc_tau, cfg.threshold, sc.threshold);
        cfg.check_enums();
        rc = cmd_score_ads(cfg, sc.ads, sc.model_dir, sc.out);
    });

    // analyze ----------------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "bucket, compare, and trend-test scored ads");
    struct {
        std::string config, scored, ads, model_dir, out_dir;
        std::string quantity = "spend", attribution = "active", bigram_order = "after";
        double threshold = 0.5, low = 0.2, high = 0.8, alpha = 0.05;
        std::size_t window = 3, top_k = 10;
    } an;
    analyze->add_option("--config", an.config, "JSON run-config file; flags override it");
    auto* an_scored = analyze->add_option("--scored", an.scored, "scored-ad CSV from score-ads");
    auto* an_ads = analyze->add_option("--ads", an.ads, "raw ad CSV (requires --model-dir)");
    auto* an_model = analyze->add_option("--model-dir", an.model_dir,
                                         "directory with a binary model.json + featurizer.json");
    analyze->add_option("--out-dir", an.out_dir, "output directory")->required();
    auto* an_tau = analyze->add_option("--threshold", an.threshold, "per-sentence threshold");
    auto* an_low = analyze->add_option("--low", an.low, "low-bucket score bound (inclusive)");
    auto* an_high = analyze->add_option("--high", an.high, "high-bucket score bound (inclusive)");
    auto* an_window = analyze->add_option("--window", an.window, "moving-average window (days)");
    auto* an_alpha = analyze->add_option("--alpha", an.alpha, "trend significance level");
    auto* an_top_k = analyze->add_option("--top-k", an.top_k, "lexical profile size");
    auto* an_quantity =
        analyze->add_option("--quantity", an.quantity, "series quantity: spend or impressions");
    auto* an_attr = analyze->add_option("--attribution", an.attribution,
                                        "day attribution: active or created");
    auto* an_bigrams = analyze->add_option("--bigram-order", an.bigram_order,
                                           "count bigrams after/before stopword removal");
    analyze->callback([&] {
        RunConfig cfg;
        if (!an.config.empty()) cfg = RunConfig::from_json(read_json_file(an.config), an.config);
        override_if_set(an_tau, cfg.threshold, an.threshold);
        override_if_set(an_low, cfg.bucket_low, an.low);
        override_if_set(an_high, cfg.bucket_high, an.high);
        override_if_set(an_window, cfg.window, an.window);
        override_if_set(an_alpha, cfg.alpha, an.alpha);
        override_if_set(an_top_k, cfg.top_k, an.top_k);
        override_if_set(an_quantity, cfg.quantity, an.quantity);
        override_if_set(an_attr, cfg.attribution, an.attribution);
        override_if_set(an_bigrams, cfg.bigram_order, an.bigram_order);
        cfg.check_enums();
        const bool have_scored = an_scored->count() > 0;
        const bool have_raw = an_ads->count() > 0;
        if (have_scored == have_raw)
            throw persua::ValidationError(
                "pass exactly one of --scored or --ads (with --model-dir)");
        if (have_raw && an_model->count() == 0)
            throw persua::ValidationError("--ads needs --model-dir to score the ads");
        rc = cmd_analyze(cfg, have_scored ? an.scored : "", an.ads, an.model_dir, an.out_dir);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help and --version exit 0
    } catch (const persua::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const persua::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const persua::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const persua::DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 7;
    } catch (const persua::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
