// qinf: command-line front end.
//
// Exit status: 0 success (including Violated and Inconclusive verdicts, which
// are reported in the payload), 1 errors, 2 failed certificate checks or
// selftest invariants.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qinf/qinf.hpp"

namespace {

using namespace qinf;
using io::json;

struct Globals {
    int precision_bits = 96;
    unsigned long seed = 1;
    unsigned threads = 1;
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) std::cout << text << '\n';
    else io::write_text_file(out, text + '\n');
}

QVectorSpec load(const std::string& path, const Globals& g) { return io::load_qvec(path, g.precision_bits); }

/// "a,b,c" or "lo:hi:step" (all exact).
std::vector<Rational> parse_grid(const std::string& text) {
    std::vector<Rational> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ParseError("grid range must be lo:hi:step");
        Rational lo = parse_decimal(parts[0]), hi = parse_decimal(parts[1]), step = parse_decimal(parts[2]);
        if (step <= 0 || hi < lo) throw InvalidArgument("grid range needs lo <= hi and step > 0");
        if ((hi - lo) / step > 100000) throw InvalidArgument("grid has too many points");
        for (Rational s = lo; s <= hi; s += step) out.push_back(s);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_decimal(p));
    if (out.empty()) throw InvalidArgument("empty grid");
    return out;
}

std::vector<std::optional<Index>> parse_m_grid(const std::string& text) {
    std::vector<std::optional<Index>> out;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        if (p == "inf") out.emplace_back(std::nullopt);
        else out.emplace_back(Rational(parse_decimal(p)).get_num());
    }
    if (out.empty()) throw InvalidArgument("empty M grid");
    return out;
}

std::vector<Index> parse_index_grid(const std::string& text) {
    std::vector<Index> out;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        Rational r = parse_decimal(p);
        if (r.get_den() != 1) throw ParseError("grid entry \"" + p + "\" is not an integer");
        out.push_back(r.get_num());
    }
    if (out.empty()) throw InvalidArgument("empty n grid");
    return out;
}

// --- selftest -------------------------------------------------------------

struct Tally {
    std::size_t passed = 0;
    std::size_t failed = 0;
    void check(bool ok) { ok ? ++passed : ++failed; }
};

json selftest(const QVectorSpec& spec, const Globals& g, std::size_t count) {
    Rng rng(g.seed);
    json report;
    Tally codec, cover, lemma;
    if (spec.exact()) {
        for (std::size_t i = 0; i < count; ++i) {
            Rational x = random_rational(rng);
            CylinderAddress a = encode(spec, Scalar(x), 8);
            Cylinder c = decode(spec, a);
            Rational len = 1;
            for (const auto& d : a.digits) len *= spec.q(d).exact();
            codec.check(c.left.exact() <= x && x < c.left.exact() + c.length.exact() && c.length.exact() == len);
        }
        CoverParams params = CoverParams::parse("0.5", "0.2", "1e-6", spec.precision());
        for (std::size_t i = 0; i < count / 10 + 1; ++i) {
            auto [a, b] = random_interval(rng);
            CoverCertificate cert = cover_interval(spec, a, b, params);
            cover.check(check_certificate(spec, cert, params).all() && verify_coverage(spec, cert));
        }
    }
    for (const char* alpha : {"0.2", "0.5", "0.8"}) {
        for (long offset : {0L, 10L, 100L}) {
            Lemma1Partition<QTailStream> part(QTailStream(spec, Index(offset)), Interval::parse(alpha, spec.precision()));
            lemma.check(part.certify(8).holds());
        }
    }
    auto tally = [](const Tally& t) { return json{{"passed", t.passed}, {"failed", t.failed}}; };
    report["qvec"] = io::qvec_json(spec);
    report["seed"] = g.seed;
    report["codec_roundtrip"] = tally(codec);
    report["cover_certificates"] = tally(cover);
    report["partition_certificates"] = tally(lemma);
    report["ok"] = codec.failed == 0 && cover.failed == 0 && lemma.failed == 0;
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-infinity expansions, block coverings, faithfulness checks and Cantor constructions"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--precision-bits", g.precision_bits, "working precision of enclosures")->default_val(96)->check(CLI::Range(32, 1 << 16));
    app.add_option("--seed", g.seed, "seed for generated test inputs")->default_val(1);
    app.add_option("--threads", g.threads, "worker threads for scans")->default_val(1)->check(CLI::Range(1, 256));

    std::string qvec_path, out_path;

    auto* encode_cmd = app.add_subcommand("encode", "first digits of the expansion of x");
    std::string x_text;
    std::size_t depth = 0;
    encode_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    encode_cmd->add_option("--x", x_text, "point in [0,1), exact p/q or decimal")->required();
    encode_cmd->add_option("--depth", depth, "number of digits")->required();

    auto* decode_cmd = app.add_subcommand("decode", "cylinder of a digit word");
    std::string digits_text;
    decode_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    decode_cmd->add_option("--digits", digits_text, "digit array, e.g. [1,0]")->required();

    auto* cover_cmd = app.add_subcommand("cover", "certified block covering of [a,b)");
    std::string a_text, b_text, alpha_text = "0.5", delta_text = "0.2", eps_text = "1e-6";
    std::size_t lazy = 0;
    cover_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    cover_cmd->add_option("--a", a_text, "left end: digits:[...] or p/q")->required();
    cover_cmd->add_option("--b", b_text, "right end: digits:[...], p/q or end")->required();
    cover_cmd->add_option("--alpha", alpha_text, "alpha in (0,1)");
    cover_cmd->add_option("--delta", delta_text, "delta in (0,alpha)");
    cover_cmd->add_option("--eps", eps_text, "residual length budget");
    cover_cmd->add_option("--lazy", lazy, "print the first N blocks of the infinite covering instead");
    cover_cmd->add_option("--out", out_path, "certificate JSON path (stdout if absent)");

    auto* check_cmd = app.add_subcommand("check-condition", "search the tail inequality on a region");
    std::string N_text, nmax_text, mmax_text;
    std::string witness_text;
    bool no_inf = false;
    check_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    check_cmd->add_option("--alpha", alpha_text, "alpha in (0,1)")->required();
    check_cmd->add_option("--delta", delta_text, "delta in (0,alpha)")->required();
    check_cmd->add_option("--N", N_text, "threshold N")->required();
    check_cmd->add_option("--n-max", nmax_text, "largest n")->required();
    check_cmd->add_option("--M-max", mmax_text, "largest finite M")->required();
    check_cmd->add_option("--witness-at", witness_text, "also report the least violating M > N at this n");
    check_cmd->add_flag("--no-infinite-cell", no_inf, "skip the M -> infinity cells");
    check_cmd->add_option("--out", out_path, "verdict JSON path (stdout if absent)");

    auto* scan_cmd = app.add_subcommand("scan-condition", "margin table over an (n, M) grid");
    std::string n_grid_text, m_grid_text, csv_path;
    scan_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    scan_cmd->add_option("--alpha", alpha_text, "alpha in (0,1)")->required();
    scan_cmd->add_option("--delta", delta_text, "delta in (0,alpha)")->required();
    scan_cmd->add_option("--n-grid", n_grid_text, "comma-separated n values")->required();
    scan_cmd->add_option("--M-grid", m_grid_text, "comma-separated M values, inf allowed")->required();
    scan_cmd->add_option("--csv", csv_path, "CSV path (stdout if absent)");

    auto* cantor_cmd = app.add_subcommand("cantor", "Cantor-like counterexample construction");
    cantor_cmd->require_subcommand(1);
    auto* build_cmd = cantor_cmd->add_subcommand("build", "build the levels");
    std::string L_text = "0.5", eps1_text = "1e-3", eps_ratio_text = "1/2";
    std::size_t levels = 3;
    build_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    build_cmd->add_option("--alpha", alpha_text, "alpha in (0,1)")->required();
    build_cmd->add_option("--delta", delta_text, "delta in (0,alpha)")->required();
    build_cmd->add_option("--L", L_text, "delta/2-volume budget in (0,1)");
    build_cmd->add_option("--eps1", eps1_text, "first tail bound eps_1");
    build_cmd->add_option("--eps-ratio", eps_ratio_text, "eps_{n+1} / eps_n");
    build_cmd->add_option("--N", N_text, "threshold N")->required();
    build_cmd->add_option("--depth", levels, "number of levels")->default_val(3);
    build_cmd->add_option("--out", out_path, "spec JSON path (stdout if absent)");

    std::string spec_path, s_grid_text = "0.01:0.99:0.01", family_text = "both", address_text;
    std::size_t level = 0;
    auto* volume_cmd = cantor_cmd->add_subcommand("volume", "level volumes over an s grid");
    volume_cmd->add_option("--spec", spec_path, "spec JSON from cantor build")->required();
    volume_cmd->add_option("--s-grid", s_grid_text, "lo:hi:step or comma list");
    volume_cmd->add_option("--family", family_text, "phi, block or both")->check(CLI::IsMember({"phi", "block", "both"}));
    volume_cmd->add_option("--level", level, "level (deepest if absent)");
    volume_cmd->add_option("--csv", csv_path, "CSV path (stdout if absent)");

    auto* measure_cmd = cantor_cmd->add_subcommand("measure", "cylinder measure and local ratio");
    std::string t_text;
    measure_cmd->add_option("--spec", spec_path, "spec JSON from cantor build")->required();
    measure_cmd->add_option("--address", address_text, "digit array inside the level windows")->required();
    measure_cmd->add_option("--t", t_text, "exponent in (0,delta) for the local ratio");

    auto* gap_cmd = cantor_cmd->add_subcommand("gap", "critical-exponent crossings of both families");
    gap_cmd->add_option("--spec", spec_path, "spec JSON from cantor build")->required();
    gap_cmd->add_option("--s-grid", s_grid_text, "lo:hi:step or comma list");
    gap_cmd->add_option("--out", out_path, "report JSON path (stdout if absent)");

    auto* self_cmd = app.add_subcommand("selftest", "run the invariant suites on one Q-vector");
    std::size_t count = 200;
    self_cmd->add_option("--qvec", qvec_path, "Q-vector JSON")->required();
    self_cmd->add_option("--count", count, "random cases per suite")->default_val(200);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*encode_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            Rational x = parse_decimal(x_text);
            emit(io::address_json(encode(spec, Scalar(x), depth)).dump(), "");
        } else if (*decode_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            Cylinder c = decode(spec, io::parse_digits(digits_text));
            emit(json{{"left", io::scalar_json(c.left)}, {"length", io::scalar_json(c.length)}}.dump(), "");
        } else if (*cover_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            QRational a = io::parse_qrational(spec, a_text);
            QRational b = io::parse_qrational(spec, b_text);
            CoverParams params = CoverParams::parse(alpha_text, delta_text, eps_text, g.precision_bits);
            if (lazy > 0) {
                params.mode = CoverMode::LazyStream;
                CoverStream stream = cover_stream(spec, a, b, params);
                json blocks = json::array();
                for (std::size_t i = 0; i < lazy; ++i) {
                    auto blk = stream.next();
                    if (!blk) break;
                    blocks.push_back(io::block_json(*blk));
                }
                emit(json{{"infinite", stream.infinite()}, {"blocks", blocks}}.dump(2), out_path);
                return 0;
            }
            CoverCertificate cert = cover_interval(spec, a, b, params);
            json j = io::certificate_json(spec, cert, params);
            emit(j.dump(2), out_path);
            bool ok = check_certificate(spec, cert, params).all();
            if (ok && spec.exact()) ok = verify_coverage(spec, cert);
            if (!ok) {
                std::cerr << "certificate checks failed\n";
                return 2;
            }
        } else if (*check_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            ConditionQuery q{parse_decimal(alpha_text), parse_decimal(delta_text), parse_index(N_text),
                             parse_index(nmax_text), parse_index(mmax_text), !no_inf, g.threads};
            ConditionVerdict v = check_condition(spec, q);
            json j = io::verdict_json(v);
            if (v.witness) j["witness_reverified"] = reverify(spec, q, *v.witness);
            if (!witness_text.empty()) {
                auto w = witness_at(spec, q, parse_index(witness_text));
                if (w) {
                    j["witness_at"] = io::cell_json(*w);
                    j["witness_at"]["reverified"] = reverify(spec, q, *w);
                } else {
                    j["witness_at"] = nullptr;
                }
            }
            emit(j.dump(2), out_path);
        } else if (*scan_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            auto cells = scan_condition_region(spec, parse_decimal(alpha_text), parse_decimal(delta_text),
                                               parse_index_grid(n_grid_text), parse_m_grid(m_grid_text));
            std::ostringstream os;
            write_margin_csv(os, cells);
            if (csv_path.empty()) std::cout << os.str();
            else io::write_text_file(csv_path, os.str());
        } else if (*build_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            CantorBuildOptions opt;
            opt.base_precision = g.precision_bits;
            CantorSpec c = build_cantor(spec, parse_decimal(alpha_text), parse_decimal(delta_text), parse_decimal(L_text),
                                        EpsilonRule{parse_decimal(eps1_text), parse_decimal(eps_ratio_text)},
                                        parse_index(N_text), levels, opt);
            emit(io::cantor_json(c).dump(2), out_path);
        } else if (*volume_cmd) {
            CantorSpec c = io::cantor_from_json(io::read_json_file(spec_path), g.precision_bits);
            const std::size_t n = level == 0 ? c.depth() : level;
            std::ostringstream os;
            os << "s,family,level,V_lower,V_upper\n";
            for (const auto& s : parse_grid(s_grid_text)) {
                for (VolumeFamily f : {VolumeFamily::PhiSplit, VolumeFamily::BlockUnion}) {
                    if (family_text == "phi" && f != VolumeFamily::PhiSplit) continue;
                    if (family_text == "block" && f != VolumeFamily::BlockUnion) continue;
                    Interval v = level_volume(c, n, s, f);
                    os << to_string(s) << ',' << to_string(f) << ',' << n << ',' << v.lower_string() << ','
                       << v.upper_string() << '\n';
                }
            }
            if (csv_path.empty()) std::cout << os.str();
            else io::write_text_file(csv_path, os.str());
        } else if (*measure_cmd) {
            CantorSpec c = io::cantor_from_json(io::read_json_file(spec_path), g.precision_bits);
            CantorAddress addr{io::parse_digits(address_text).digits};
            json j{{"address", address_text}, {"measure", io::interval_json(measure_cylinder(c, addr))}};
            if (!t_text.empty()) {
                RatioCertificate r = local_dim_ratio(c, addr, parse_decimal(t_text));
                j["ratio"] = io::interval_json(r.ratio);
                j["bound"] = io::interval_json(r.bound);
                j["bound_holds"] = r.holds();
            }
            emit(j.dump(2), "");
        } else if (*gap_cmd) {
            CantorSpec c = io::cantor_from_json(io::read_json_file(spec_path), g.precision_bits);
            GapReport r = dimension_gap(c, parse_grid(s_grid_text));
            json j{{"phi_split", io::crossing_json(r.phi)},
                   {"block_union", io::crossing_json(r.block)},
                   {"separated", r.separated()}};
            j["margin_estimate"] = r.margin() ? json(*r.margin()) : json(nullptr);
            emit(j.dump(2), out_path);
        } else if (*self_cmd) {
            QVectorSpec spec = load(qvec_path, g);
            json r = selftest(spec, g, count);
            emit(r.dump(2), "");
            return r["ok"].get<bool>() ? 0 : 2;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 1;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 1;
    } catch (const BoundaryAmbiguity& e) {
        std::cerr << "boundary ambiguity: " << e.what() << '\n';
        return 1;
    } catch (const NoViolation& e) {
        std::cerr << "no violation: " << e.what() << '\n';
        return 1;
    } catch (const BudgetInfeasible& e) {
        std::cerr << "budget infeasible: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
