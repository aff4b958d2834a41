#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "persua/analytics.hpp"
#include "persua/corpus.hpp"
#include "persua/error.hpp"

namespace persua {

using nlohmann::json;

LabelSchema LabelSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label schema file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("bad label schema JSON in " + path + ": " + e.what());
    }
    if (!j.is_array()) throw ParseError("label schema must be a JSON array of strings");
    std::vector<std::string> names;
    for (const auto& item : j) {
        if (!item.is_string())
            throw ParseError("label schema must be a JSON array of strings");
        names.push_back(item.get<std::string>());
    }
    return LabelSchema::from_names(std::move(names));
}

void LabelSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write label schema file: " + path);
    out << json(names).dump(2) << "\n";
}

std::vector<LabeledSentence> load_sentences(const std::string& path,
                                            const LabelSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sentence file: " + path);

    std::vector<LabeledSentence> out;
    std::set<std::pair<std::string, std::uint32_t>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("expected a JSON object", line_no);

        LabeledSentence s;
        try {
            s.doc_id = j.at("doc_id").get<std::string>();
            const auto sid = j.at("sentence_id").get<std::int64_t>();
            if (sid < 0) throw ParseError("sentence_id must be >= 0", line_no);
            s.sentence_id = static_cast<std::uint32_t>(sid);
            s.text = j.at("text").get<std::string>();
            for (const auto& name : j.at("labels")) {
                const auto label = name.get<std::string>();
                auto it = schema.index.find(label);
                if (it == schema.index.end())
                    throw ParseError("unknown label '" + label + "'", line_no);
                s.labels.push_back(it->second);
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad sentence record: ") + e.what(), line_no);
        }
        std::sort(s.labels.begin(), s.labels.end());
        s.labels.erase(std::unique(s.labels.begin(), s.labels.end()), s.labels.end());

        if (j.contains("binary") && !j["binary"].is_null()) {
            if (!j["binary"].is_string())
                throw ParseError("binary must be 'neutral', 'persuasive', or null", line_no);
            try {
                s.binary = binary_label_from_string(j["binary"].get<std::string>());
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no);
            }
        }

        if (!seen.emplace(s.doc_id, s.sentence_id).second)
            throw ParseError("duplicate (doc_id, sentence_id): " + s.doc_id + "/" +
                                 std::to_string(s.sentence_id),
                             line_no);
        out.push_back(std::move(s));
    }
    return out;
}

void save_sentences(const std::string& path, const std::vector<LabeledSentence>& sentences,
                    const LabelSchema& schema) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sentence file: " + path);
    for (const auto& s : sentences) {
        json j;
        j["doc_id"] = s.doc_id;
        j["sentence_id"] = s.sentence_id;
        j["text"] = s.text;
        json labels = json::array();
        for (auto id : s.labels) labels.push_back(schema.names.at(id));
        j["labels"] = std::move(labels);
        j["binary"] = s.binary ? json(to_string(*s.binary)) : json(nullptr);
        out << j.dump() << "\n";
    }
}

// ---- ad CSV ------------------------------------------------------------------

namespace {

const std::vector<std::string>& ad_csv_header() {
    static const std::vector<std::string> header = {
        "ad_id",          "text",     "funder",       "created",
        "start_date",     "end_date", "spend_lo",     "spend_hi",
        "impressions_lo", "impressions_hi", "demographics",
    };
    return header;
}

// RFC 4180: quoted fields may contain commas, quotes (doubled), and newlines.
// Returns one record per call; line_no tracks physical lines for messages.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                     std::size_t& line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line_no;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted CSV field", line_no);
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

double parse_money(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("unparsable ") + what + " value '" + s + "'", line_no);
    }
}

std::int64_t parse_count(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("unparsable ") + what + " value '" + s + "'", line_no);
    }
}

std::vector<Demographic> parse_demographics(const std::string& s, std::size_t line_no) {
    if (s.empty() || s == "[]") return {};
    json j;
    try {
        j = json::parse(s);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad demographics JSON: ") + e.what(), line_no);
    }
    if (!j.is_array()) throw ParseError("demographics must be a JSON array", line_no);
    std::vector<Demographic> out;
    for (const auto& item : j) {
        Demographic d;
        try {
            d.age_bucket = item.at("age_bucket").get<std::string>();
            d.gender = item.at("gender").get<std::string>();
            d.fraction = item.at("fraction").get<double>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad demographics entry: ") + e.what(), line_no);
        }
        out.push_back(std::move(d));
    }
    return out;
}

AdRecord parse_ad_fields(const std::vector<std::string>& fields, std::size_t record_line) {
    AdRecord ad;
    ad.ad_id = fields[0];
    ad.text = fields[1];
    ad.funder = fields[2];
    try {
        ad.created = Date::parse_iso(fields[3]);
        ad.start_date = Date::parse_iso(fields[4]);
        ad.end_date = Date::parse_iso(fields[5]);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), record_line);
    }
    ad.spend_lo = parse_money(fields[6], "spend_lo", record_line);
    ad.spend_hi = parse_money(fields[7], "spend_hi", record_line);
    ad.impressions_lo = parse_count(fields[8], "impressions_lo", record_line);
    ad.impressions_hi = parse_count(fields[9], "impressions_hi", record_line);
    ad.demographics = parse_demographics(fields[10], record_line);
    try {
        validate(ad);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), record_line);
    }
    return ad;
}

void write_ad_row(std::ostream& out, const AdRecord& ad) {
    validate(ad);
    json demo = json::array();
    for (const auto& d : ad.demographics)
        demo.push_back({{"age_bucket", d.age_bucket},
                        {"gender", d.gender},
                        {"fraction", d.fraction}});
    std::ostringstream spend_lo, spend_hi;
    spend_lo << ad.spend_lo;
    spend_hi << ad.spend_hi;
    out << csv_escape(ad.ad_id) << "," << csv_escape(ad.text) << ","
        << csv_escape(ad.funder) << "," << ad.created.to_iso() << ","
        << ad.start_date.to_iso() << "," << ad.end_date.to_iso() << ","
        << spend_lo.str() << "," << spend_hi.str() << "," << ad.impressions_lo << ","
        << ad.impressions_hi << ","
        << csv_escape(ad.demographics.empty() ? "[]" : demo.dump());
}

}  // namespace

void validate(const AdRecord& ad) {
    if (ad.ad_id.empty()) throw ValidationError("ad record with empty ad_id");
    if (ad.spend_lo < 0 || ad.spend_hi < 0 || ad.impressions_lo < 0 || ad.impressions_hi < 0)
        throw ValidationError("ad " + ad.ad_id + ": spend and impressions must be >= 0");
    if (ad.spend_lo > ad.spend_hi)
        throw ValidationError("ad " + ad.ad_id + ": spend_lo > spend_hi");
    if (ad.impressions_lo > ad.impressions_hi)
        throw ValidationError("ad " + ad.ad_id + ": impressions_lo > impressions_hi");
    if (ad.start_date > ad.end_date)
        throw ValidationError("ad " + ad.ad_id + ": end_date precedes start_date");
    if (!ad.demographics.empty()) {
        double total = 0.0;
        for (const auto& d : ad.demographics) {
            if (d.fraction < 0.0 || d.fraction > 1.0)
                throw ValidationError("ad " + ad.ad_id + ": demographic fraction outside [0,1]");
            total += d.fraction;
        }
        if (std::fabs(total - 1.0) > 1e-6)
            throw ValidationError("ad " + ad.ad_id + ": demographic fractions sum to " +
                                  std::to_string(total) + ", expected 1");
    }
}

std::vector<AdRecord> load_ads(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open ad file: " + path);

    std::size_t line_no = 1;
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields, line_no))
        throw ParseError("empty ad file (missing header): " + path);
    const auto& header = ad_csv_header();
    if (fields != header) {
        for (const auto& col : header)
            if (std::find(fields.begin(), fields.end(), col) == fields.end())
                throw ParseError("missing column '" + col + "' in ad CSV header", 1);
        throw ParseError("unexpected ad CSV header layout", 1);
    }

    std::vector<AdRecord> out;
    while (true) {
        const std::size_t record_line = line_no;
        if (!read_csv_record(in, fields, line_no)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                                 std::to_string(fields.size()),
                             record_line);
        out.push_back(parse_ad_fields(fields, record_line));
    }
    return out;
}

void save_ads(const std::string& path, const std::vector<AdRecord>& ads) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write ad file: " + path);
    const auto& header = ad_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";

    for (const auto& ad : ads) {
        write_ad_row(out, ad);
        out << "\n";
    }
}

void save_scored_ads(const std::string& path, const std::vector<ScoredAd>& ads) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write scored ad file: " + path);
    const auto& header = ad_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << ",score,n_sentences\n";

    for (const auto& s : ads) {
        if (!(s.score >= 0.0 && s.score <= 1.0))
            throw ValidationError("ad " + s.ad.ad_id + ": score outside [0,1]");
        if (s.n_sentences == 0)
            throw ValidationError("ad " + s.ad.ad_id + ": scored ad must have sentences");
        std::ostringstream score;
        score << s.score;
        write_ad_row(out, s.ad);
        out << "," << score.str() << "," << s.n_sentences << "\n";
    }
}

std::vector<ScoredAd> load_scored_ads(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scored ad file: " + path);

    std::size_t line_no = 1;
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields, line_no))
        throw ParseError("empty scored ad file (missing header): " + path);
    auto header = ad_csv_header();
    header.push_back("score");
    header.push_back("n_sentences");
    if (fields != header) throw ParseError("unexpected scored ad CSV header layout", 1);

    std::vector<ScoredAd> out;
    while (true) {
        const std::size_t record_line = line_no;
        if (!read_csv_record(in, fields, line_no)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                                 std::to_string(fields.size()),
                             record_line);
        ScoredAd s;
        s.ad = parse_ad_fields(fields, record_line);
        s.score = parse_money(fields[11], "score", record_line);
        const std::int64_t n = parse_count(fields[12], "n_sentences", record_line);
        if (!(s.score >= 0.0 && s.score <= 1.0))
            throw ParseError("score outside [0,1]", record_line);
        if (n <= 0) throw ParseError("n_sentences must be >= 1", record_line);
        s.n_sentences = static_cast<std::size_t>(n);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace persua
