#include "heckelab/forms.hpp"

#include <json.hpp>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heckelab/errors.hpp"

namespace heckelab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

}  // namespace

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

namespace {

// Strict form: -?digits or -?digits/digits with nonzero denominator.  GMP's
// own string constructor is too lax here (it ignores embedded whitespace).
mpq_class parse_rational(const std::string& s, const std::string& where) {
    auto bad = [&](const char* why) {
        return ParseError(where + ": bad rational \"" + s + "\": " + why);
    };
    auto all_digits = [](const std::string& t) {
        if (t.empty()) return false;
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    size_t slash = s.find('/');
    std::string num = s.substr(0, slash == std::string::npos ? s.size() : slash);
    if (!num.empty() && num[0] == '-') num.erase(0, 1);
    if (!all_digits(num)) throw bad("malformed numerator");
    mpz_class n(s.substr(0, slash == std::string::npos ? s.size() : slash));
    mpz_class d(1);
    if (slash != std::string::npos) {
        std::string den = s.substr(slash + 1);
        if (!all_digits(den)) throw bad("malformed denominator");
        d = mpz_class(den);
        if (d == 0) throw bad("zero denominator");
    }
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

long require_long(const json& v, const std::string& where, const char* key) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ParseError(where + ": field \"" + key + "\": integer expected");
    return static_cast<long>(v.get<long long>());
}

void require_label_filename(const std::string& label, const char* op) {
    if (label.empty() || label == "." || label == ".." ||
        label.find('/') != std::string::npos || label.find('\\') != std::string::npos)
        throw UsageError(std::string(op) + ": label \"" + label +
                         "\" is not usable as a cache file name");
}

std::string g_cache_override;
std::atomic<unsigned long> g_tmp_counter{0};

}  // namespace

EigenformRecord record_from_orbit(const EigenformOrbit& orbit) {
    EigenformRecord rec;
    rec.label = std::to_string(orbit.level) + "." + std::to_string(orbit.weight) + "." +
                std::to_string(orbit.orbit_index);
    rec.level = orbit.level;
    rec.weight = orbit.weight;
    rec.field_poly = orbit.field_poly;
    rec.hecke_field = orbit.hecke_field;
    rec.prec = static_cast<long>(orbit.an.size()) - 1;
    for (long n = 1; n <= rec.prec; ++n) rec.an.emplace(n, orbit.an[n]);
    rec.source = "engine";
    return rec;
}

ValidationReport validate(const EigenformRecord& rec) {
    ValidationReport rep;
    const NumberField& K = *rec.hecke_field;
    size_t deg = K.degree();
    auto has = [&](long n) {
        auto it = rec.an.find(n);
        return it != rec.an.end() && it->second.size() == deg;
    };
    for (long n = 1; n <= rec.prec; ++n)
        if (!has(n))
            rep.push_back({"structure", n,
                           rec.an.count(n) ? "coordinate length does not match the field degree"
                                           : "a_n missing"});
    if (has(1) && !(rec.an.at(1) == K.one()))
        rep.push_back({"normalization", 1, "a_1 != 1"});
    for (long n = 2; n <= rec.prec; ++n) {
        long p = 2;
        while (p * p <= n && n % p != 0) ++p;
        if (n % p != 0) p = n;
        long pe = p, m = n / p;
        while (m % p == 0) {
            pe *= p;
            m /= p;
        }
        if (m > 1) {
            if (!has(n) || !has(pe) || !has(m)) continue;
            if (!(rec.an.at(n) == K.mul(rec.an.at(pe), rec.an.at(m))))
                rep.push_back({"multiplicativity", n,
                               "a_" + std::to_string(n) + " != a_" + std::to_string(pe) +
                                   " * a_" + std::to_string(m)});
        } else if (pe > p) {
            long q1 = n / p, q2 = q1 / p;
            if (!has(n) || !has(p) || !has(q1) || !has(q2)) continue;
            NFCoords expect = K.mul(rec.an.at(p), rec.an.at(q1));
            std::string rule;
            if (rec.level % p == 0) {
                rule = "a_" + std::to_string(p) + " * a_" + std::to_string(q1);
            } else {
                mpz_class w;
                mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(p),
                              static_cast<unsigned long>(rec.weight - 1));
                expect = K.sub(expect, K.mul(K.from_rational(mpq_class(w)), rec.an.at(q2)));
                rule = "a_" + std::to_string(p) + " * a_" + std::to_string(q1) + " - " +
                       std::to_string(p) + "^" + std::to_string(rec.weight - 1) + " * a_" +
                       std::to_string(q2);
            }
            if (!(rec.an.at(n) == expect))
                rep.push_back({"recurrence", n, "a_" + std::to_string(n) + " != " + rule});
        }
    }
    return rep;
}

std::string serialize_record(const EigenformRecord& rec) {
    std::ostringstream os;
    os << "{\"label\":\"" << json_escape(rec.label) << "\",\"level\":" << rec.level
       << ",\"weight\":" << rec.weight << ",\"character\":\"" << json_escape(rec.character)
       << "\",\"field_poly\":[";
    for (size_t i = 0; i < rec.field_poly.size(); ++i) {
        if (i) os << ",";
        os << rec.field_poly[i].get_str();
    }
    os << "],\"an\":{";
    bool first = true;
    for (const auto& [n, a] : rec.an) {
        if (!first) os << ",";
        first = false;
        os << "\"" << n << "\":[";
        for (size_t i = 0; i < a.size(); ++i) {
            if (i) os << ",";
            os << "\"" << a[i].get_str() << "\"";
        }
        os << "]";
    }
    os << "},\"prec\":" << rec.prec << ",\"source\":\"" << json_escape(rec.source) << "\"}";
    return os.str();
}

EigenformRecord parse_record(const std::string& line, const std::string& where_in) {
    const std::string where = where_in.empty() ? std::string("record") : where_in;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": record is not an object");
    static const char* known[] = {"label",      "level", "weight", "character",
                                  "field_poly", "an",    "prec",   "source"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ParseError(where + ": unknown field \"" + it.key() + "\"");
    }
    auto need = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) throw ParseError(where + ": missing field \"" + key + "\"");
        return *it;
    };

    EigenformRecord rec;
    const json& jl = need("label");
    if (!jl.is_string() || jl.get<std::string>().empty())
        throw ParseError(where + ": field \"label\": nonempty string expected");
    rec.label = jl.get<std::string>();
    rec.level = require_long(need("level"), where, "level");
    if (rec.level < 1) throw ParseError(where + ": field \"level\": positive integer required");
    rec.weight = require_long(need("weight"), where, "weight");
    if (rec.weight < 2) throw ParseError(where + ": field \"weight\": integer >= 2 required");
    const json& jc = need("character");
    if (!jc.is_string() || jc.get<std::string>() != "trivial")
        throw ParseError(where + ": field \"character\": only \"trivial\" is accepted");
    rec.character = "trivial";

    const json& jf = need("field_poly");
    if (!jf.is_array() || jf.empty())
        throw ParseError(where + ": field \"field_poly\": nonempty integer array expected");
    for (size_t i = 0; i < jf.size(); ++i) {
        if (!jf[i].is_number_integer() && !jf[i].is_number_unsigned())
            throw ParseError(where + ": field \"field_poly\"[" + std::to_string(i) +
                             "]: integer expected");
        rec.field_poly.push_back(mpz_class(static_cast<long>(jf[i].get<long long>())));
    }
    try {
        rec.hecke_field = NumberField::create(rec.field_poly);
    } catch (const Error& e) {
        throw ParseError(where + ": field \"field_poly\": " + e.what());
    }

    rec.prec = require_long(need("prec"), where, "prec");
    if (rec.prec < 1) throw ParseError(where + ": field \"prec\": integer >= 1 required");

    const json& ja = need("an");
    if (!ja.is_object()) throw ParseError(where + ": field \"an\": object expected");
    size_t deg = rec.hecke_field->degree();
    for (auto it = ja.begin(); it != ja.end(); ++it) {
        const std::string& key = it.key();
        bool digits = !key.empty() && key[0] != '0';
        for (char c : key) digits = digits && std::isdigit(static_cast<unsigned char>(c));
        if (!digits || key.size() > 12)
            throw ParseError(where + ": field \"an\": bad index \"" + key + "\"");
        long n = std::stol(key);
        std::string fw = where + ": field \"an\".\"" + key + "\"";
        const json& arr = it.value();
        if (!arr.is_array() || arr.size() != deg)
            throw ParseError(fw + ": array of " + std::to_string(deg) +
                             " rational strings expected");
        NFCoords a;
        for (size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_string())
                throw ParseError(fw + "[" + std::to_string(i) + "]: rational string expected");
            a.push_back(parse_rational(arr[i].get<std::string>(),
                                       fw + "[" + std::to_string(i) + "]"));
        }
        rec.an[n] = std::move(a);
    }
    for (long n = 1; n <= rec.prec; ++n)
        if (!rec.an.count(n))
            throw ParseError(where + ": field \"an\": missing index " + std::to_string(n));
    if (static_cast<long>(rec.an.size()) != rec.prec)
        throw ParseError(where + ": field \"an\": contains indices beyond prec");

    auto its = j.find("source");
    if (its == j.end()) {
        rec.source = "ingested";
    } else {
        if (!its->is_string() ||
            (its->get<std::string>() != "engine" && its->get<std::string>() != "ingested"))
            throw ParseError(where +
                             ": field \"source\": \"engine\" or \"ingested\" expected");
        rec.source = its->get<std::string>();
    }
    return rec;
}

std::vector<EigenformRecord> import_qexp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("import_qexp: cannot open " + path);
    std::vector<EigenformRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_record(line, path + ":" + std::to_string(lineno)));
    }
    if (in.bad()) throw IoError("import_qexp: read error on " + path);
    for (const auto& r : out) {
        ValidationReport rep = validate(r);
        if (!rep.empty()) {
            std::ostringstream msg;
            msg << "import_qexp: record \"" << r.label << "\" in " << path
                << " fails validation:";
            for (const auto& iss : rep) msg << " [" << iss.invariant << " at n=" << iss.n << "]";
            throw ValidationError(msg.str());
        }
    }
    return out;
}

void set_cache_root(const std::string& dir) { g_cache_override = dir; }

std::string cache_root() {
    if (!g_cache_override.empty()) return g_cache_override;
    if (const char* env = std::getenv("HECKELAB_CACHE_DIR"); env && *env) return env;
    return "cache";
}

std::string cache_put(const EigenformRecord& rec) {
    require_label_filename(rec.label, "cache_put");
    fs::path dir = cache_root();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cache_put: cannot create directory " + dir.string() + ": " +
                      ec.message());
    fs::path final_path = dir / (rec.label + ".rec");
    fs::path tmp = dir / (rec.label + ".rec.tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(g_tmp_counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cache_put: cannot open " + tmp.string() + " for writing");
        out << serialize_record(rec) << '\n';
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoError("cache_put: write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, final_path, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("cache_put: rename to " + final_path.string() + " failed: " +
                      ec.message());
    }
    return final_path.string();
}

EigenformRecord cache_get(const std::string& label) {
    require_label_filename(label, "cache_get");
    fs::path p = fs::path(cache_root()) / (label + ".rec");
    std::ifstream in(p, std::ios::binary);
    if (!in) throw NotFound("cache_get: no record \"" + label + "\" at " + p.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(p.string() + ": empty record file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return parse_record(line, p.string() + ":1");
}

void Dataset::add(EigenformRecord rec) {
    if (by_label_.count(rec.label))
        throw UsageError("dataset: duplicate label \"" + rec.label + "\"");
    size_t idx = records_.size();
    by_label_[rec.label] = idx;
    by_lw_[{rec.level, rec.weight}].push_back(idx);
    records_.push_back(std::move(rec));
}

const EigenformRecord* Dataset::find(const std::string& label) const {
    auto it = by_label_.find(label);
    return it == by_label_.end() ? nullptr : &records_[it->second];
}

std::vector<const EigenformRecord*> Dataset::at_level_weight(long level, long weight) const {
    std::vector<const EigenformRecord*> out;
    auto it = by_lw_.find({level, weight});
    if (it != by_lw_.end())
        for (size_t idx : it->second) out.push_back(&records_[idx]);
    return out;
}

}  // namespace heckelab
