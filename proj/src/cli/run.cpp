#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cattab/association.hpp"
#include "cattab/cli.hpp"
#include "cattab/distributions.hpp"
#include "cattab/errors.hpp"
#include "cattab/inference.hpp"
#include "cattab/simulate.hpp"
#include "cattab/special.hpp"

namespace cattab::cli {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- request

struct AnalysisRequest {
    std::string command;
    std::string analysis;
    std::string input_path;
    std::string input_format = "counts";
    std::string output_format = "text";
    std::vector<std::string> row_order;
    std::vector<std::string> col_order;
    bool ordinal = false;

    std::string given = "both";
    bool emit_counts = false;

    std::string scores;
    long long successes = -1;
    long long trials = -1;
    std::optional<double> null_value;
    double level = 0.95;
    double alpha = 0.05;
    std::string sided = "two";
    bool clip = false;

    std::vector<std::string> rows_pair;
    std::vector<std::string> cols_pair;
    bool zero_correction = false;

    long long n = -1;
    std::vector<double> probs;
    std::vector<long long> outcomes;
    std::optional<double> rate;

    std::string scheme = "multinomial";
    std::string test = "pearson";
    long long replicates = 10000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<double> pi;
};

// ---------------------------------------------------------------- report

struct Report {
    Json results = Json::object();
    std::vector<std::string> warnings;
    std::optional<std::string> digest;
    std::ostringstream text;
};

Json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

template <typename Derived>
Json matrix_json(const Eigen::MatrixBase<Derived>& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if constexpr (std::is_integral_v<typename Derived::Scalar>) row.push_back(m(i, j));
            else row.push_back(num(double(m(i, j))));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Derived>
Json vector_json(const Eigen::MatrixBase<Derived>& v) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if constexpr (std::is_integral_v<typename Derived::Scalar>) out.push_back(v(k));
        else out.push_back(num(double(v(k))));
    }
    return out;
}

Json test_json(const TestResult& t) {
    Json j;
    j["kind"] = to_string(t.kind);
    j["statistic"] = num(t.statistic);
    if (t.z) j["z"] = num(*t.z);
    j["df"] = t.df;
    j["p_value"] = num(t.p_value);
    if (t.sidedness) j["sidedness"] = to_string(*t.sidedness);
    j["small_cell_warning"] = t.small_cell_warning;
    return j;
}

class Styler {
public:
    explicit Styler(bool on) : on_(on) {}
    std::string bold(const std::string& s) const { return on_ ? "\033[1m" + s + "\033[0m" : s; }

private:
    bool on_;
};

std::string fixed(double v, int digits) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << v;
    return o.str();
}

std::string pval(double p) {
    if (p < 1e-4) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", p);
        return buf;
    }
    return fixed(p, 4);
}

// Labeled grid in the layout of a two-way table, with optional margins.
template <typename Cell>
void grid(std::ostream& out, const ContingencyTable& table, Cell cell, const std::vector<std::string>& row_margin = {},
          const std::vector<std::string>& col_margin = {}, const std::string& corner = "") {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head{""};
    for (const auto& l : table.col_labels()) head.push_back(l);
    if (!row_margin.empty()) head.push_back("Total");
    rows.push_back(head);
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        std::vector<std::string> r{table.row_labels()[std::size_t(i)]};
        for (Eigen::Index j = 0; j < table.cols(); ++j) r.push_back(cell(i, j));
        if (!row_margin.empty()) r.push_back(row_margin[std::size_t(i)]);
        rows.push_back(r);
    }
    if (!col_margin.empty()) {
        std::vector<std::string> r{"Total"};
        for (const auto& c : col_margin) r.push_back(c);
        if (!row_margin.empty()) r.push_back(corner);
        rows.push_back(r);
    }
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& r : rows)
        for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
    for (const auto& r : rows) {
        out << "  " << std::left << std::setw(int(width[0])) << r[0];
        for (std::size_t k = 1; k < r.size(); ++k) out << "  " << std::right << std::setw(int(width[k])) << r[k];
        out << '\n';
    }
}

// ---------------------------------------------------------------- inputs

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("invalid number '" + s + "' in " + what);
    }
}

ContingencyTable reorder(const ContingencyTable& t, const std::vector<std::string>& rows,
                         const std::vector<std::string>& cols) {
    auto permutation = [](const std::vector<std::string>& order, const std::vector<std::string>& labels,
                          auto index_of, const char* axis) {
        if (order.empty()) {
            std::vector<Eigen::Index> id(labels.size());
            for (std::size_t k = 0; k < id.size(); ++k) id[k] = Eigen::Index(k);
            return id;
        }
        if (order.size() != labels.size()) {
            throw InputError(std::string("--") + axis + "-order must list all " + std::to_string(labels.size()) +
                             " " + axis + " labels");
        }
        std::vector<Eigen::Index> idx;
        for (const auto& l : order) idx.push_back(index_of(l));
        return idx;
    };
    const auto ri = permutation(rows, t.row_labels(), [&](const std::string& l) { return t.row_index(l); }, "row");
    const auto ci = permutation(cols, t.col_labels(), [&](const std::string& l) { return t.col_index(l); }, "col");
    CountMatrix m(t.rows(), t.cols());
    std::vector<std::string> rl, cl;
    for (std::size_t a = 0; a < ri.size(); ++a) {
        rl.push_back(t.row_labels()[std::size_t(ri[a])]);
        for (std::size_t b = 0; b < ci.size(); ++b) m(Eigen::Index(a), Eigen::Index(b)) = t.count(ri[a], ci[b]);
    }
    for (auto c : ci) cl.push_back(t.col_labels()[std::size_t(c)]);
    return ContingencyTable(std::move(m), std::move(rl), std::move(cl), t.row_ordinal(), t.col_ordinal());
}

ContingencyTable load_table(const AnalysisRequest& req, Report& report) {
    if (req.input_path.empty()) throw InputError("--input is required for '" + req.command + "'");
    const std::string text = read_file(req.input_path);
    ContingencyTable table = [&] {
        if (req.input_format == "records") {
            CategoryOrder order;
            if (!req.row_order.empty()) order.rows = req.row_order;
            if (!req.col_order.empty()) order.cols = req.col_order;
            const RecordSet records = parse_records_csv(text);
            try {
                return crosstab(records, order);
            } catch (const DomainError& e) {
                throw InputError(std::string(e.what()));
            }
        }
        return reorder(parse_counts_csv(text), req.row_order, req.col_order);
    }();
    if (req.ordinal) table = table.with_ordinal(true, true);
    report.digest = table_digest(table);
    return table;
}

// "1:5,1:5" (two ranges) or "1,2,4/1,3" (slash between row and column lists).
ScoreAssignment parse_scores(const std::string& spec, const ContingencyTable& table) {
    auto parse_part = [&](const std::string& part, Eigen::Index expected, const char* axis) {
        std::vector<double> values;
        if (part.find(':') != std::string::npos) {
            const auto ends = split(part, ':');
            if (ends.size() != 2) throw InputError("invalid score range '" + part + "'");
            const double lo = parse_double(ends[0], "--scores");
            const double hi = parse_double(ends[1], "--scores");
            if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo) {
                throw InputError("score range '" + part + "' must be increasing integers");
            }
            for (double v = lo; v <= hi; v += 1) values.push_back(v);
        } else {
            for (const auto& s : split(part, ',')) values.push_back(parse_double(s, "--scores"));
        }
        if (Eigen::Index(values.size()) != expected) {
            throw DomainError(std::string("--scores: ") + std::to_string(values.size()) + " " + axis +
                              " scores for " + std::to_string(expected) + " categories");
        }
        return Vector<double>(Eigen::Map<const Vector<double>>(values.data(), Eigen::Index(values.size())));
    };
    std::vector<std::string> parts = spec.find('/') != std::string::npos ? split(spec, '/') : split(spec, ',');
    if (parts.size() != 2) throw InputError("--scores expects R,C ranges (1:5,1:5) or R/C lists (1,2,3/1,2)");
    return ScoreAssignment(parse_part(parts[0], table.rows(), "row"), parse_part(parts[1], table.cols(), "column"));
}

std::optional<ScoreAssignment> scores_for(const AnalysisRequest& req, const ContingencyTable& table) {
    if (req.scores.empty()) return std::nullopt;
    return parse_scores(req.scores, table);
}

Eigen::Index resolve_index(const std::string& token, const std::vector<std::string>& labels, const char* axis) {
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k] == token) return Eigen::Index(k);
    long long idx = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec == std::errc() && p == token.data() + token.size()) {
        if (idx < 1 || idx > static_cast<long long>(labels.size())) {
            throw DomainError(std::string(axis) + " index " + token + " out of range 1.." + std::to_string(labels.size()));
        }
        return Eigen::Index(idx - 1);
    }
    throw DomainError(std::string("unknown ") + axis + " category '" + token + "'");
}

std::pair<Eigen::Index, Eigen::Index> resolve_pair(const std::vector<std::string>& tokens,
                                                   const std::vector<std::string>& labels, const char* axis) {
    if (tokens.empty()) return {0, 1};
    if (tokens.size() != 2) throw InputError(std::string("--") + axis + "s expects two categories");
    return {resolve_index(tokens[0], labels, axis), resolve_index(tokens[1], labels, axis)};
}

Sidedness parse_sided(const std::string& s) {
    if (s == "two") return Sidedness::two_sided;
    if (s == "upper") return Sidedness::upper;
    return Sidedness::lower;
}

// ---------------------------------------------------------------- commands

void cmd_describe(const AnalysisRequest& req, Report& rep, const Styler& st) {
    const ContingencyTable table = load_table(req, rep);
    const auto est = joint_probabilities(table);
    auto& r = rep.results;
    r["rows"] = table.row_labels();
    r["cols"] = table.col_labels();
    r["counts"] = matrix_json(table.counts());
    r["row_totals"] = vector_json(table.row_totals());
    r["col_totals"] = vector_json(table.col_totals());
    r["total"] = table.total();
    r["joint"] = matrix_json(est.joint);
    r["row_marginal"] = vector_json(est.row_marginal);
    r["col_marginal"] = vector_json(est.col_marginal);

    auto& out = rep.text;
    std::vector<std::string> rt, ct;
    for (Eigen::Index i = 0; i < table.rows(); ++i) rt.push_back(std::to_string(table.row_total(i)));
    for (Eigen::Index j = 0; j < table.cols(); ++j) ct.push_back(std::to_string(table.col_total(j)));
    out << st.bold("Counts") << " (n = " << table.total() << ")\n";
    grid(out, table, [&](auto i, auto j) { return std::to_string(table.count(i, j)); }, rt, ct,
         std::to_string(table.total()));

    std::vector<std::string> rm, cm;
    for (Eigen::Index i = 0; i < table.rows(); ++i) rm.push_back(fixed(est.row_marginal(i), 4));
    for (Eigen::Index j = 0; j < table.cols(); ++j) cm.push_back(fixed(est.col_marginal(j), 4));
    out << '\n' << st.bold("Joint and marginal probabilities") << '\n';
    grid(out, table, [&](auto i, auto j) { return fixed(est.joint(i, j), 4); }, rm, cm, fixed(1.0, 4));

    auto conditional = [&](Axis axis, const char* key, const char* title) {
        try {
            const auto cond = conditional_probabilities(table, axis);
            r[key] = matrix_json(cond);
            out << '\n' << st.bold(title) << '\n';
            grid(out, table, [&](auto i, auto j) { return fixed(cond(i, j), 4); });
        } catch (const DomainError& e) {
            if (req.given != "both") throw;
            r[key] = nullptr;
            rep.warnings.push_back(e.what());
        }
    };
    if (req.given == "rows" || req.given == "both")
        conditional(Axis::rows, "conditional_given_rows", "Conditional probabilities given rows");
    if (req.given == "cols" || req.given == "both")
        conditional(Axis::cols, "conditional_given_cols", "Conditional probabilities given columns");
}

void table_test_payload(const TableTestResult& t, const ContingencyTable& table, const AnalysisRequest& req,
                        Report& rep, const Styler& st) {
    const auto hyp = t.expected.hypothesis;
    auto& r = rep.results;
    r["hypothesis"] = to_string(hyp);
    r["pearson"] = test_json(t.pearson);
    r["deviance"] = test_json(t.deviance);
    r["expected"] = matrix_json(t.expected.values);
    r["alpha"] = num(req.alpha);
    const bool reject = t.pearson.p_value < req.alpha && t.deviance.p_value < req.alpha;
    const bool split_decision = (t.pearson.p_value < req.alpha) != (t.deviance.p_value < req.alpha);
    std::string conclusion;
    if (hyp == Hypothesis::independence) {
        conclusion = reject ? "reject independence: the row and column variables are associated"
                   : split_decision ? "X2 and G2 disagree at this alpha; independence is borderline"
                                    : "fail to reject independence";
    } else {
        conclusion = reject ? "reject homogeneity: the conditional response distributions differ across rows"
                   : split_decision ? "X2 and G2 disagree at this alpha; homogeneity is borderline"
                                    : "fail to reject homogeneity of the conditional response distributions";
    }
    r["conclusion"] = conclusion;
    if (t.pearson.small_cell_warning) {
        rep.warnings.push_back("expected frequency below 5 in at least one cell; chi-square approximation may be poor");
    }

    auto& out = rep.text;
    out << st.bold(hyp == Hypothesis::independence ? "Test of independence" : "Test of homogeneity") << '\n';
    out << "  Pearson X2 = " << fixed(t.pearson.statistic, 3) << "  df = " << t.pearson.df
        << "  p = " << pval(t.pearson.p_value) << '\n';
    out << "  Deviance G2 = " << fixed(t.deviance.statistic, 3) << "  df = " << t.deviance.df
        << "  p = " << pval(t.deviance.p_value) << '\n';
    out << '\n' << st.bold("Expected frequencies") << '\n';
    grid(out, table, [&](auto i, auto j) { return fixed(t.expected.values(i, j), 2); });
    out << "\nConclusion (alpha = " << req.alpha << "): " << conclusion << '\n';
}

void cmd_test(const AnalysisRequest& req, Report& rep, const Styler& st) {
    auto& r = rep.results;
    auto& out = rep.text;
    if (req.analysis == "independence" || req.analysis == "homogeneity") {
        const ContingencyTable table = load_table(req, rep);
        const auto t = req.analysis == "independence" ? independence_test(table) : homogeneity_test(table);
        table_test_payload(t, table, req, rep, st);
    } else if (req.analysis == "linear") {
        const ContingencyTable table = load_table(req, rep);
        const auto scores = scores_for(req, table);
        const TestResult t = mantel_haenszel_test(table, scores);
        const ScoreAssignment used = scores ? *scores : ScoreAssignment::equally_spaced(table);
        const double corr = pearson_correlation(table, used);
        r["row_scores"] = vector_json(used.row_scores());
        r["col_scores"] = vector_json(used.col_scores());
        r["correlation"] = num(corr);
        r["mantel_haenszel"] = test_json(t);
        r["n"] = table.total();
        out << st.bold("Test of linear association (Mantel-Haenszel)") << '\n'
            << "  r = " << fixed(corr, 4) << '\n'
            << "  M2 = (n - 1) r^2 = " << fixed(t.statistic, 3) << "  df = 1  p = " << pval(t.p_value) << '\n';
    } else {
        if (req.successes < 0 || req.trials < 0) throw InputError("test proportion needs --successes and --trials");
        const double pi0 = req.null_value.value_or(0.5);
        const auto y = req.successes;
        const auto n = req.trials;
        const auto mle = mle_proportion(y, n);
        const auto score = score_test_proportion(y, n, pi0, parse_sided(req.sided));
        const auto lr = lr_test_proportion(y, n, pi0);
        const auto ci = wald_ci(y, n, req.level, req.clip);

        r["successes"] = y;
        r["trials"] = n;
        r["null"] = num(pi0);
        r["estimate"] = num(mle.estimate);
        r["standard_error"] = num(mle.standard_error);
        Json sj = test_json(score);
        sj["null_standard_error"] = num(std::sqrt(pi0 * (1 - pi0) / double(n)));
        sj["p_two_sided"] = num(score_test_proportion(y, n, pi0, Sidedness::two_sided).p_value);
        sj["p_upper"] = num(score_test_proportion(y, n, pi0, Sidedness::upper).p_value);
        sj["p_lower"] = num(score_test_proportion(y, n, pi0, Sidedness::lower).p_value);
        r["score"] = sj;
        try {
            r["wald"] = test_json(wald_test_proportion(y, n, pi0));
        } catch (const DomainError& e) {
            r["wald"] = nullptr;
            rep.warnings.push_back(e.what());
        }
        Json lj = test_json(lr.test);
        lj["log_l0"] = num(lr.detail.log_l0);
        lj["log_l1"] = num(lr.detail.log_l1);
        r["likelihood_ratio"] = lj;
        r["wald_ci"] = {{"level", num(ci.level)},
                        {"lower", num(ci.lower)},
                        {"upper", num(ci.upper)},
                        {"critical_value", num(ci.critical_value)},
                        {"standard_error", num(ci.standard_error)},
                        {"contains_null", ci.contains(pi0)},
                        {"clipped", ci.clipped}};
        if (ci.degenerate) rep.warnings.push_back("estimate on the boundary: Wald interval has zero width");

        out << st.bold("Single proportion") << "  y = " << y << ", n = " << n << ", null = " << pi0 << '\n'
            << "  estimate = " << fixed(mle.estimate, 4) << "  SE = " << fixed(mle.standard_error, 4) << '\n'
            << "  score z = " << fixed(*score.z, 3) << "  p (" << to_string(*score.sidedness)
            << ") = " << pval(score.p_value) << '\n';
        if (!r["wald"].is_null()) {
            out << "  Wald z^2 = " << fixed(r["wald"]["statistic"].get<double>(), 4)
                << "  p = " << pval(r["wald"]["p_value"].get<double>()) << '\n';
        }
        out << "  LR chi2 = " << fixed(lr.test.statistic, 4) << "  p = " << pval(lr.test.p_value) << '\n'
            << "  " << fixed(100 * ci.level, 1) << "% Wald CI = (" << fixed(ci.lower, 4) << ", "
            << fixed(ci.upper, 4) << ")  contains null: " << (ci.contains(pi0) ? "yes" : "no") << '\n';
    }
}

void cmd_assoc(const AnalysisRequest& req, Report& rep, const Styler& st) {
    const ContingencyTable table = load_table(req, rep);
    auto& r = rep.results;
    auto& out = rep.text;
    if (req.analysis == "odds-ratio") {
        const auto rows = resolve_pair(req.rows_pair, table.row_labels(), "row");
        const auto cols = resolve_pair(req.cols_pair, table.col_labels(), "col");
        const auto orr = odds_ratio(table, rows, cols, req.zero_correction);
        auto label = [&](const std::vector<std::string>& v, Eigen::Index k) { return v[std::size_t(k)]; };
        Json odds_by_col = Json::array();
        for (Eigen::Index c : {cols.first, cols.second}) {
            try {
                odds_by_col.push_back({{"col", label(table.col_labels(), c)},
                                       {"odds", num(odds(table, rows.first, rows.second, c))}});
            } catch (const DomainError& e) {
                odds_by_col.push_back({{"col", label(table.col_labels(), c)}, {"odds", nullptr}});
                rep.warnings.push_back(e.what());
            }
        }
        r["rows"] = {label(table.row_labels(), rows.first), label(table.row_labels(), rows.second)};
        r["cols"] = {label(table.col_labels(), cols.first), label(table.col_labels(), cols.second)};
        r["odds"] = odds_by_col;
        r["odds_ratio"] = num(orr.estimate);
        r["infinite"] = orr.infinite();
        r["zero_correction"] = orr.correction_applied;
        if (orr.infinite()) rep.warnings.push_back("zero cell in the odds-ratio denominator; estimate is +infinity");

        out << st.bold("Odds ratio") << "  rows (" << r["rows"][0].get<std::string>() << " vs "
            << r["rows"][1].get<std::string>() << "), cols (" << r["cols"][0].get<std::string>() << ", "
            << r["cols"][1].get<std::string>() << ")\n";
        for (const auto& o : odds_by_col) {
            out << "  odds given " << o["col"].get<std::string>() << " = "
                << (o["odds"].is_number() ? fixed(o["odds"].get<double>(), 4) : std::string("undefined")) << '\n';
        }
        out << "  odds ratio = " << fixed(orr.estimate, 4) << (orr.correction_applied ? "  (0.5 added to cells)" : "")
            << '\n';
    } else {
        const auto scores = scores_for(req, table).value_or(ScoreAssignment::equally_spaced(table));
        const double corr = pearson_correlation(table, scores);
        r["row_scores"] = vector_json(scores.row_scores());
        r["col_scores"] = vector_json(scores.col_scores());
        r["correlation"] = num(corr);
        out << st.bold("Pearson correlation") << "\n  r = " << fixed(corr, 4) << '\n';
    }
}

void cmd_dist(const AnalysisRequest& req, Report& rep, const Styler& st) {
    auto& r = rep.results;
    auto& out = rep.text;
    if (req.analysis == "binomial") {
        if (req.n < 0 || req.probs.size() != 1 || req.outcomes.size() != 1) {
            throw InputError("dist binomial needs --n, --p <prob> and --y <count>");
        }
        const BinomialSpec<double> spec{req.n, req.probs[0]};
        const auto m = binomial_moments(spec);
        const double lp = log_binomial_pmf(spec, req.outcomes[0]);
        r = {{"n", req.n}, {"p", num(req.probs[0])}, {"y", req.outcomes[0]}, {"pmf", num(std::exp(lp))},
             {"log_pmf", num(lp)}, {"mean", num(m.mean)}, {"variance", num(m.variance)}};
        out << st.bold("Binomial") << "  n = " << req.n << ", p = " << req.probs[0] << '\n'
            << "  P(Y = " << req.outcomes[0] << ") = " << std::setprecision(10) << std::exp(lp) << '\n'
            << "  mean = " << m.mean << "  variance = " << m.variance << '\n';
    } else if (req.analysis == "multinomial") {
        if (req.probs.empty() || req.outcomes.size() != req.probs.size()) {
            throw InputError("dist multinomial needs --p and --y lists of equal length");
        }
        long long n = 0;
        for (auto y : req.outcomes) n += y;
        if (req.n >= 0 && req.n != n) throw DomainError("multinomial: counts sum to " + std::to_string(n) + " but --n = " + std::to_string(req.n));
        MultinomialSpec<double> spec{n, Eigen::Map<const Vector<double>>(req.probs.data(), Eigen::Index(req.probs.size()))};
        const double lp = log_multinomial_pmf(spec, std::span<const long long>(req.outcomes));
        r = {{"n", n}, {"p", vector_json(spec.category_probs)}, {"y", req.outcomes}, {"pmf", num(std::exp(lp))},
             {"log_pmf", num(lp)}};
        out << st.bold("Multinomial") << "  n = " << n << '\n'
            << "  P(Y = y) = " << std::setprecision(10) << std::exp(lp) << '\n';
    } else {
        if (!req.rate || req.outcomes.size() != 1) throw InputError("dist poisson needs --rate and --y");
        const PoissonSpec<double> spec{*req.rate};
        const double lp = log_poisson_pmf(spec, req.outcomes[0]);
        const auto m = poisson_moments(spec);
        r = {{"rate", num(*req.rate)}, {"y", req.outcomes[0]}, {"pmf", num(std::exp(lp))}, {"log_pmf", num(lp)},
             {"mean", num(m.mean)}, {"variance", num(m.variance)}};
        out << st.bold("Poisson") << "  rate = " << *req.rate << '\n'
            << "  P(Y = " << req.outcomes[0] << ") = " << std::setprecision(10) << std::exp(lp) << '\n';
    }
}

void cmd_simulate(const AnalysisRequest& req, Report& rep, const Styler& st) {
    if (!req.seed) throw InputError("simulate requires an explicit --seed");
    auto& r = rep.results;
    auto& out = rep.text;
    if (req.analysis == "calibrate") {
        const ContingencyTable table = load_table(req, rep);
        const SchemeKind kind = req.scheme == "poisson"    ? SchemeKind::poisson
                                : req.scheme == "binomial" ? SchemeKind::binomial_rows_fixed
                                                           : SchemeKind::multinomial_total_fixed;
        const NullTest test = req.test == "deviance"          ? NullTest::deviance
                              : req.test == "mantel-haenszel" ? NullTest::mantel_haenszel
                                                              : NullTest::pearson;
        CalibrationOptions opts;
        opts.replicates = req.replicates;
        opts.seed = *req.seed;
        opts.threads = req.threads;
        opts.scores = scores_for(req, table);
        const auto report = calibrate_null(null_scheme_from_margins(table, kind), test, opts);
        Json rates = Json::object();
        for (const auto& rr : report.rejection_rates) rates[fixed(rr.alpha, 2)] = num(rr.rate);
        r = {{"scheme", to_string(kind)},
             {"statistic_kind", to_string(report.statistic_kind)},
             {"replicates", report.replicates},
             {"degenerate_replicates", report.degenerate_replicates},
             {"reference_df", report.reference_df},
             {"empirical_mean", num(report.empirical_mean)},
             {"rejection_rates", rates},
             {"seed", report.seed},
             {"generator", report.generator}};
        out << st.bold("Null calibration") << "  " << to_string(report.statistic_kind) << " under "
            << to_string(kind) << ", " << report.replicates << " replicates, seed " << report.seed << '\n'
            << "  empirical mean = " << fixed(report.empirical_mean, 4) << "  (df = " << report.reference_df << ")\n";
        for (const auto& rr : report.rejection_rates)
            out << "  rejection rate at alpha " << fixed(rr.alpha, 2) << " = " << fixed(rr.rate, 4) << '\n';
        if (report.degenerate_replicates > 0) {
            rep.warnings.push_back(std::to_string(report.degenerate_replicates) +
                                   " replicates had an empty margin and were skipped");
        }
    } else {
        if (!req.pi || req.trials < 1) throw InputError("simulate coverage needs --pi and --trials");
        const double cov = coverage_wald_ci(*req.pi, req.trials, req.level, req.replicates, *req.seed, req.threads);
        const double se = std::sqrt(cov * (1 - cov) / double(req.replicates));
        r = {{"pi", num(*req.pi)},       {"trials", req.trials}, {"level", num(req.level)},
             {"replicates", req.replicates}, {"coverage", num(cov)}, {"standard_error", num(se)},
             {"seed", *req.seed},        {"generator", kGeneratorName}};
        out << st.bold("Wald interval coverage") << "  pi = " << *req.pi << ", n = " << req.trials
            << ", level = " << req.level << '\n'
            << "  coverage = " << fixed(cov, 4) << " (MC SE " << fixed(se, 4) << ", " << req.replicates
            << " replicates, seed " << *req.seed << ")\n";
    }
}

Json command_echo(const AnalysisRequest& req) {
    Json c;
    c["name"] = req.command;
    if (!req.analysis.empty()) c["analysis"] = req.analysis;
    return c;
}

}  // namespace

RunResult run(const std::vector<std::string>& args, bool styled) {
    RunResult result;
    AnalysisRequest req;

    CLI::App app{"Categorical data analysis for two-way contingency tables", "cattab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolVersion));
    app.add_option("--format", req.output_format, "Output format")->check(CLI::IsMember({"text", "json"}));

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input,-i", req.input_path, "Counts or records CSV");
        sub->add_option("--input-format", req.input_format, "counts (matrix) or records (two columns)")
            ->check(CLI::IsMember({"counts", "records"}));
        sub->add_option("--row-order", req.row_order, "Explicit row label order")->delimiter(',');
        sub->add_option("--col-order", req.col_order, "Explicit column label order")->delimiter(',');
        sub->add_flag("--ordinal", req.ordinal, "Treat both axes as ordinal (default scores 1..I, 1..J)");
    };

    auto* describe = app.add_subcommand("describe", "Joint, marginal and conditional probability estimates");
    add_input(describe);
    describe->add_option("--given", req.given, "Conditioning axis")->check(CLI::IsMember({"rows", "cols", "both"}));
    describe->add_flag("--emit-counts", req.emit_counts, "Print the parsed table as counts CSV");

    auto* test = app.add_subcommand("test", "Hypothesis tests");
    test->add_option("analysis", req.analysis)->required()->check(
        CLI::IsMember({"independence", "homogeneity", "linear", "proportion"}));
    add_input(test);
    test->add_option("--scores", req.scores, "Scores R,C: ranges 1:5,1:5 or lists 1,2,3/1,2");
    test->add_option("--successes", req.successes, "Successes y (proportion)");
    test->add_option("--trials", req.trials, "Trials n (proportion)");
    test->add_option("--null", req.null_value, "Null probability pi0 (proportion, default 0.5)");
    test->add_option("--level", req.level, "Confidence level");
    test->add_option("--alpha", req.alpha, "Significance level for the stated conclusion");
    test->add_option("--sided", req.sided, "Score test alternative")->check(CLI::IsMember({"two", "upper", "lower"}));
    test->add_flag("--clip", req.clip, "Clip the Wald interval to [0, 1]");

    auto* assoc = app.add_subcommand("assoc", "Association measures");
    assoc->add_option("analysis", req.analysis)->required()->check(CLI::IsMember({"odds-ratio", "correlation"}));
    add_input(assoc);
    assoc->add_option("--rows", req.rows_pair, "Row pair i,i* (labels or 1-based)")->delimiter(',');
    assoc->add_option("--cols", req.cols_pair, "Column pair j,j* (labels or 1-based)")->delimiter(',');
    assoc->add_flag("--zero-correction", req.zero_correction, "Add 0.5 to the four cells");
    assoc->add_option("--scores", req.scores, "Scores R,C: ranges 1:5,1:5 or lists 1,2,3/1,2");

    auto* dist = app.add_subcommand("dist", "Sampling distribution PMFs");
    dist->add_option("analysis", req.analysis)->required()->check(CLI::IsMember({"binomial", "multinomial", "poisson"}));
    dist->add_option("--n", req.n, "Trials");
    dist->add_option("--p", req.probs, "Probability (binomial) or category probabilities")->delimiter(',');
    dist->add_option("--y", req.outcomes, "Outcome count(s)")->delimiter(',');
    dist->add_option("--rate", req.rate, "Poisson rate");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo calibration");
    sim->add_option("analysis", req.analysis)->required()->check(CLI::IsMember({"calibrate", "coverage"}));
    add_input(sim);
    sim->add_option("--scheme", req.scheme, "Sampling design")->check(CLI::IsMember({"poisson", "binomial", "multinomial"}));
    sim->add_option("--test", req.test, "Statistic")->check(CLI::IsMember({"pearson", "deviance", "mantel-haenszel"}));
    sim->add_option("--replicates", req.replicates, "Replicates");
    sim->add_option("--seed", req.seed, "Master seed (required)");
    sim->add_option("--threads", req.threads, "Worker threads");
    sim->add_option("--scores", req.scores, "Scores for mantel-haenszel");
    sim->add_option("--pi", req.pi, "True probability (coverage)");
    sim->add_option("--trials", req.trials, "Trials n (coverage)");
    sim->add_option("--level", req.level, "Confidence level (coverage)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, err;
        const int code = app.exit(e, o, err);
        result.out = o.str();
        result.err = err.str();
        result.exit_code = code == 0 ? kOk : kInputError;
        return result;
    }
    req.command = app.get_subcommands().front()->get_name();

    Report report;
    const Styler styler(styled);
    try {
        if (req.command == "describe" && req.emit_counts) {
            result.out = format_counts_csv(load_table(req, report));
            return result;
        }
        if (req.command == "describe") {
            cmd_describe(req, report, styler);
        } else if (req.command == "test") {
            cmd_test(req, report, styler);
        } else if (req.command == "assoc") {
            cmd_assoc(req, report, styler);
        } else if (req.command == "dist") {
            cmd_dist(req, report, styler);
        } else {
            cmd_simulate(req, report, styler);
        }
    } catch (const InputError& e) {
        result.exit_code = kInputError;
        result.err = std::string("cattab: input error: ") + e.what() + "\n";
        return result;
    } catch (const std::domain_error& e) {
        result.exit_code = kDomainError;
        result.err = std::string("cattab: domain error: ") + e.what() + "\n";
        return result;
    }

    if (req.output_format == "json") {
        Json env;
        env["version"] = kToolVersion;
        env["input_digest"] = report.digest ? Json(*report.digest) : Json(nullptr);
        env["command"] = command_echo(req);
        env["results"] = report.results;
        env["warnings"] = report.warnings;
        result.out = env.dump(2) + "\n";
    } else {
        result.out = report.text.str();
        for (const auto& w : report.warnings) result.out += "warning: " + w + "\n";
    }
    return result;
}

}  // namespace cattab::cli
