#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "heckelab/errors.hpp"
#include "heckelab/forms.hpp"
#include "heckelab/modsym.hpp"

using namespace heckelab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() /
                 ("heckelab_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CacheRootGuard {
    explicit CacheRootGuard(const std::string& dir) { set_cache_root(dir); }
    ~CacheRootGuard() { set_cache_root(""); }
};

EigenformRecord rational_record(long level, long weight, long prec,
                                const std::vector<long>& an_num) {
    EigenformRecord rec;
    rec.label = std::to_string(level) + "." + std::to_string(weight) + ".0";
    rec.level = level;
    rec.weight = weight;
    rec.field_poly = ZPoly{0, 1};
    rec.hecke_field = NumberField::create(rec.field_poly);
    rec.prec = prec;
    for (long n = 1; n <= prec; ++n)
        rec.an[n] = rec.hecke_field->from_rational(an_num[static_cast<size_t>(n)]);
    return rec;
}

bool has_issue(const ValidationReport& rep, const std::string& kind, long n) {
    for (const auto& iss : rep)
        if (iss.invariant == kind && iss.n == n) return true;
    return false;
}

}  // namespace

TEST_CASE("record from level-11 orbit: label, fields, validation") {
    auto orbits = newform_decomposition(11, 20);
    REQUIRE(orbits.size() == 1);
    EigenformRecord rec = record_from_orbit(orbits[0]);
    CHECK(rec.label == "11.2.0");
    CHECK(rec.level == 11);
    CHECK(rec.weight == 2);
    CHECK(rec.character == "trivial");
    CHECK(rec.source == "engine");
    CHECK(rec.prec == 20);
    CHECK(rec.field_poly == ZPoly{2, 1});
    CHECK(rec.an.size() == 20);
    CHECK(validate(rec).empty());
}

TEST_CASE("serialized bytes are pinned") {
    EigenformRecord rec;
    rec.label = "t.1";
    rec.level = 6;
    rec.weight = 2;
    rec.field_poly = ZPoly{0, 1};
    rec.hecke_field = NumberField::create(rec.field_poly);
    rec.prec = 2;
    rec.an[1] = NFCoords{mpq_class(1)};
    rec.an[2] = NFCoords{mpq_class(-1, 2)};
    rec.source = "ingested";
    CHECK(serialize_record(rec) ==
          "{\"label\":\"t.1\",\"level\":6,\"weight\":2,\"character\":\"trivial\","
          "\"field_poly\":[0,1],\"an\":{\"1\":[\"1\"],\"2\":[\"-1/2\"]},\"prec\":2,"
          "\"source\":\"ingested\"}");
    CHECK(parse_record(serialize_record(rec)) == rec);
}

TEST_CASE("round trip is the identity on randomized records") {
    std::mt19937 rng(20260814);
    std::vector<ZPoly> fields = {
        ZPoly{0, 1}, ZPoly{1, 1}, ZPoly{1, 0, 1}, ZPoly{-1, -1, 1}, ZPoly{1, 1, 0, 1}};
    auto rnd = [&](long lo, long hi) {
        return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
    };
    for (int trial = 0; trial < 40; ++trial) {
        EigenformRecord rec;
        rec.label = "x" + std::to_string(trial) + "\"q\\u\tz";
        rec.level = rnd(1, 50);
        rec.weight = rnd(2, 8);
        rec.field_poly = fields[static_cast<size_t>(rnd(0, 4))];
        rec.hecke_field = NumberField::create(rec.field_poly);
        rec.prec = rnd(1, 8);
        for (long n = 1; n <= rec.prec; ++n) {
            NFCoords a;
            for (size_t i = 0; i < rec.hecke_field->degree(); ++i) {
                mpq_class q(rnd(-200, 200), rnd(1, 50));
                q.canonicalize();
                a.push_back(q);
            }
            rec.an[n] = a;
        }
        rec.source = (trial % 2) ? "engine" : "ingested";
        std::string line = serialize_record(rec);
        EigenformRecord back = parse_record(line);
        CHECK(back == rec);
        CHECK(serialize_record(back) == line);
    }
}

TEST_CASE("validate flags normalization, recurrence, multiplicativity with the index") {
    // level 5, weight 4, a_2 = 3 so a_4 = 3^2 - 2^3 = 1; a_6 = a_2 a_3
    EigenformRecord rec = rational_record(5, 4, 6, {0, 1, 3, 2, 1, 7, 6});
    CHECK(validate(rec).empty());

    SUBCASE("a_1 != 1") {
        rec.an[1] = rec.hecke_field->from_rational(0);
        auto rep = validate(rec);
        CHECK(has_issue(rep, "normalization", 1));
        // a_1 feeds the n=4 recurrence term, so that breaks too
        CHECK(has_issue(rep, "recurrence", 4));
        CHECK(rep.size() == 2);
    }
    SUBCASE("prime-power recurrence at n=4 uses the weight term") {
        rec.an[4] = rec.hecke_field->from_rational(2);
        auto rep = validate(rec);
        CHECK(has_issue(rep, "recurrence", 4));
        CHECK(!has_issue(rep, "multiplicativity", 4));
    }
    SUBCASE("multiplicativity at n=6") {
        rec.an[6] = rec.hecke_field->from_rational(0);
        auto rep = validate(rec);
        CHECK(rep.size() == 1);
        CHECK(has_issue(rep, "multiplicativity", 6));
    }
    SUBCASE("several violations all reported") {
        rec.an[1] = rec.hecke_field->from_rational(-1);
        rec.an[4] = rec.hecke_field->from_rational(2);
        rec.an[6] = rec.hecke_field->from_rational(0);
        auto rep = validate(rec);
        CHECK(has_issue(rep, "normalization", 1));
        CHECK(has_issue(rep, "recurrence", 4));
        CHECK(has_issue(rep, "multiplicativity", 6));
    }
}

TEST_CASE("recurrence at a prime dividing the level omits the weight term") {
    auto orbits = newform_decomposition(14, 8);
    REQUIRE(orbits.size() == 1);
    EigenformRecord rec = record_from_orbit(orbits[0]);
    CHECK(validate(rec).empty());
    // a_2 = -1 at level 14; U_2 rule forces a_4 = a_2^2 = 1
    CHECK(rec.an.at(4) == rec.hecke_field->one());
    rec.an[4] = rec.hecke_field->from_rational(-1);  // what the away-from-N rule would give
    auto rep = validate(rec);
    CHECK(has_issue(rep, "recurrence", 4));
    CHECK(has_issue(rep, "recurrence", 8));  // a_8 = a_2 a_4 drags along
    CHECK(rep.size() == 2);
}

TEST_CASE("validate reports structural gaps without throwing") {
    EigenformRecord rec = rational_record(5, 4, 6, {0, 1, 3, 2, 1, 7, 6});
    rec.an.erase(3);
    rec.an[5] = NFCoords{};  // wrong length
    auto rep = validate(rec);
    CHECK(has_issue(rep, "structure", 3));
    CHECK(has_issue(rep, "structure", 5));
}

TEST_CASE("engine output for N <= 60 validates cleanly and labels are unique") {
    Dataset ds;
    for (long N = 1; N <= 60; ++N) {
        auto orbits = newform_decomposition(N, 30);
        for (const auto& orb : orbits) {
            EigenformRecord rec = record_from_orbit(orb);
            CHECK(validate(rec).empty());
            ds.add(std::move(rec));
        }
    }
    CHECK(ds.find("11.2.0") != nullptr);
    CHECK(ds.find("37.2.1") != nullptr);
    CHECK(ds.find("nope") == nullptr);
    CHECK(ds.at_level_weight(37, 2).size() == 2);
    CHECK(ds.at_level_weight(12, 2).empty());
    CHECK_THROWS_AS(ds.add(*ds.find("11.2.0")), UsageError);
}

TEST_CASE("parse_record rejects malformed input with positioned messages") {
    EigenformRecord ok = rational_record(5, 4, 2, {0, 1, 3});
    std::string line = serialize_record(ok);

    CHECK_THROWS_AS(parse_record("not json", "f:1"), ParseError);
    CHECK_THROWS_AS(parse_record("[1,2]", "f:1"), ParseError);

    auto replaced = [&](const std::string& from, const std::string& to) {
        std::string s = line;
        auto pos = s.find(from);
        REQUIRE(pos != std::string::npos);
        s.replace(pos, from.size(), to);
        return s;
    };
    // zero denominator
    try {
        parse_record(replaced("\"3\"", "\"3/0\""), "f:7");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string w = e.what();
        CHECK(w.find("f:7") != std::string::npos);
        CHECK(w.find("an") != std::string::npos);
        CHECK(w.find("zero denominator") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_record(replaced("\"3\"", "\"3/2/1\"")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"3\"", "\"1 2\"")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"3\"", "3")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"character\":\"trivial\"",
                                          "\"character\":\"quadratic\"")),
                    ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"level\":5", "\"level\":0")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"weight\":4", "\"weight\":1")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("\"prec\":2", "\"prec\":3")), ParseError);
    CHECK_THROWS_AS(parse_record(replaced("[0,1]", "[2,4,2]")), ParseError);  // reducible
    CHECK_THROWS_AS(parse_record(replaced("\"source\":\"engine\"", "\"source\":\"oracle\"")),
                    ParseError);
    CHECK_THROWS_AS(parse_record(line + " {}"), ParseError);
    // unknown key
    CHECK_THROWS_AS(parse_record(replaced("\"prec\"", "\"prcision\"")), ParseError);
    // a record without "source" is ingested
    std::string no_source = line.substr(0, line.find(",\"source\"")) + "}";
    CHECK(parse_record(no_source).source == "ingested");
}

TEST_CASE("import_qexp reads whole files or fails atomically") {
    fs::path dir = fresh_dir("import");
    EigenformRecord r1 = rational_record(5, 4, 4, {0, 1, 3, 2, 1});
    EigenformRecord r2 = rational_record(7, 2, 3, {0, 1, -1, 0});
    r2.label = "ext-7a";
    r1.source = r2.source = "ingested";

    SUBCASE("well-formed file of two records") {
        std::ofstream out(dir / "good.qexp");
        out << serialize_record(r1) << "\n\n" << serialize_record(r2) << "\n";
        out.close();
        auto recs = import_qexp((dir / "good.qexp").string());
        REQUIRE(recs.size() == 2);
        CHECK(recs[0] == r1);
        CHECK(recs[1] == r2);
        CHECK(recs[1].label == "ext-7a");  // external labels kept verbatim
    }
    SUBCASE("parse failure carries the line number") {
        std::ofstream out(dir / "bad.qexp");
        out << serialize_record(r1) << "\n{\"label\":}\n";
        out.close();
        try {
            import_qexp((dir / "bad.qexp").string());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("validation failure aborts the import") {
        EigenformRecord broken = r1;
        broken.an[4] = broken.hecke_field->from_rational(0);
        std::ofstream out(dir / "invalid.qexp");
        out << serialize_record(r1) << "\n" << serialize_record(broken) << "\n";
        out.close();
        try {
            import_qexp((dir / "invalid.qexp").string());
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            std::string w = e.what();
            CHECK(w.find("recurrence") != std::string::npos);
            CHECK(w.find("n=4") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(import_qexp((dir / "absent.qexp").string()), IoError);
    }
    fs::remove_all(dir);
}

TEST_CASE("cache round trip is bit-exact; unknown labels are NotFound") {
    fs::path dir = fresh_dir("cache");
    CacheRootGuard guard(dir.string());

    auto orbits = newform_decomposition(11, 12);
    EigenformRecord rec = record_from_orbit(orbits[0]);
    std::string path = cache_put(rec);
    CHECK(path == (dir / "11.2.0.rec").string());
    CHECK(fs::exists(path));
    EigenformRecord back = cache_get("11.2.0");
    CHECK(back == rec);
    CHECK(serialize_record(back) == serialize_record(rec));

    CHECK_THROWS_AS(cache_get("99.2.0"), NotFound);
    CHECK_THROWS_AS(cache_put([&] {
        EigenformRecord r = rec;
        r.label = "../escape";
        return r;
    }()), UsageError);

    // last writer wins
    EigenformRecord shorter = rec;
    shorter.prec = 5;
    shorter.an.erase(shorter.an.upper_bound(5), shorter.an.end());
    cache_put(shorter);
    CHECK(cache_get("11.2.0") == shorter);

    // no temp droppings
    size_t files = 0;
    for (auto& entry : fs::directory_iterator(dir)) {
        (void)entry;
        ++files;
    }
    CHECK(files == 1);
    fs::remove_all(dir);
}

TEST_CASE("cache root: override beats environment beats default") {
    fs::path env_dir = fresh_dir("cache_env");
    ::setenv("HECKELAB_CACHE_DIR", env_dir.string().c_str(), 1);
    CHECK(cache_root() == env_dir.string());
    {
        CacheRootGuard guard("/some/override");
        CHECK(cache_root() == "/some/override");
    }
    CHECK(cache_root() == env_dir.string());
    ::unsetenv("HECKELAB_CACHE_DIR");
    CHECK(cache_root() == "cache");
    fs::remove_all(env_dir);
}
