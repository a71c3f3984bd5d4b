#include "spinbath/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "spinbath/errors.hpp"

namespace spinbath::harness {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Output formatting

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

// Minimal streaming JSON writer: fixed key order and 17-digit numbers make output
// reproducible byte for byte.
class JsonWriter {
public:
    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        separator();
        indent();
        out_ << '"' << k << "\": ";
        pending_key_ = true;
        return *this;
    }
    JsonWriter& number(double v) {
        value_prefix();
        if (std::isfinite(v)) {
            out_ << format_double(v);
        } else {
            out_ << "null";
        }
        return *this;
    }
    JsonWriter& integer(std::uint64_t v) {
        value_prefix();
        out_ << v;
        return *this;
    }
    JsonWriter& boolean(bool v) {
        value_prefix();
        out_ << (v ? "true" : "false");
        return *this;
    }
    JsonWriter& string(const std::string& v) {
        value_prefix();
        out_ << '"';
        for (char c : v) {
            if (c == '"' || c == '\\') {
                out_ << '\\' << c;
            } else if (c == '\n') {
                out_ << "\\n";
            } else {
                out_ << c;
            }
        }
        out_ << '"';
        return *this;
    }
    JsonWriter& null() {
        value_prefix();
        out_ << "null";
        return *this;
    }
    JsonWriter& complex(cplx z) { return begin_array(true).number(z.real()).number(z.imag()).end_array(); }
    JsonWriter& numbers(const std::vector<double>& xs) {
        begin_array(true);
        for (double x : xs) number(x);
        return end_array();
    }

    std::string str() const { return out_.str() + "\n"; }

private:
    struct Level {
        bool first = true;
        bool inline_items = false;
    };

    JsonWriter& begin_array(bool inline_items) {
        open('[');
        levels_.back().inline_items = inline_items;
        return *this;
    }
    JsonWriter& open(char c) {
        value_prefix();
        out_ << c;
        levels_.push_back({});
        return *this;
    }
    JsonWriter& close(char c) {
        const Level level = levels_.back();
        levels_.pop_back();
        if (!level.first && !level.inline_items) {
            out_ << '\n';
            indent();
        }
        out_ << c;
        return *this;
    }
    void separator() {
        if (levels_.empty()) return;
        if (!levels_.back().first) out_ << ',';
        if (!levels_.back().inline_items) out_ << '\n';
        else if (!levels_.back().first) out_ << ' ';
        levels_.back().first = false;
    }
    void value_prefix() {
        if (pending_key_) {
            pending_key_ = false;
            return;
        }
        separator();
        if (!levels_.empty() && !levels_.back().inline_items) indent();
    }
    void indent() {
        for (std::size_t i = 0; i < levels_.size(); ++i) out_ << "  ";
    }

    std::ostringstream out_;
    std::vector<Level> levels_;
    bool pending_key_ = false;
};

void write_model(JsonWriter& w, const SpinBathModel& model) {
    w.begin_object();
    w.key("a").complex(model.a());
    w.key("b").complex(model.b());
    w.key("spins").begin_array();
    for (const auto& s : model.spins()) {
        w.begin_object();
        w.key("alpha").complex(s.alpha);
        w.key("beta").complex(s.beta);
        w.key("g").number(s.g);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

void write_report(JsonWriter& w, const lemma::LemmaReport& r, const lemma::VerdictConfig& config) {
    w.begin_object();
    w.key("verdict").string(lemma::to_string(r.verdict));
    w.key("route").string(lemma::to_string(r.route));
    w.key("n_points").number(r.n_points);
    w.key("quasi_continuous").boolean(r.quasi_continuous);
    w.key("qc_gap_cv").number(r.qc_gap_cv);
    w.key("qc_ks_stat").number(r.qc_ks_stat);
    w.key("in_l1").boolean(r.in_l1);
    w.key("l1_max_weight").number(r.l1_max_weight);
    w.key("l1_max_group_deviation").number(r.l1_max_group_deviation);
    w.key("l1_worst_group").integer(r.l1_worst_group);
    w.key("g_groups").integer(r.g_groups);
    w.key("p_per_group").integer(r.p_per_group);
    if (r.recurrence_time.is_finite()) {
        w.key("recurrence_time").number(r.recurrence_time.period());
        w.key("recurrence_spacing").number(r.recurrence_time.spacing());
    } else {
        w.key("recurrence_time").string("EffectivelyInfinite");
        w.key("recurrence_spacing").null();
    }
    if (r.lemma_sum_magnitude_at_half_tp) {
        w.key("lemma_sum_magnitude_at_half_tp").number(*r.lemma_sum_magnitude_at_half_tp);
    } else {
        w.key("lemma_sum_magnitude_at_half_tp").string("NotEvaluated");
    }
    w.key("sum_of_weights").number(r.sum_of_weights);
    w.key("max_multiplicity").integer(r.max_multiplicity);
    w.key("has_degeneracies").boolean(r.has_degeneracies());

    w.key("thresholds").begin_object();
    w.key("n_min").integer(config.qc.n_min);
    w.key("cv_max").number(config.qc.cv_max);
    w.key("ks_max").number(config.qc.ks_max);
    w.key("eps_global").number(config.l1.eps_global);
    w.key("eps_group").number(config.l1.eps_group);
    w.key("q_max").integer(config.recurrence.q_max);
    w.key("rel_tolerance").number(config.recurrence.rel_tolerance);
    w.key("omega_tolerance").number(config.omega_tolerance);
    w.key("enumeration_cap").integer(config.enumeration_cap);
    w.end_object();
    w.end_object();
}

// ---------------------------------------------------------------------------
// Parsing helpers; every failure names the JSON path of the field.

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(child(path, key), "missing required field");
    return *it;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* name) { return k == name; })) {
            throw ConfigError(child(path, k), "unknown field");
        }
    }
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

cplx as_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [re, im], an array of 2 numbers");
    return {as_number(j[0], element(path, 0)), as_number(j[1], element(path, 1))};
}

void check_normalized(cplx x, cplx y, const std::string& path) {
    const double residual = std::norm(x) + std::norm(y) - 1.0;
    if (std::abs(residual) > kNormTolerance) {
        throw ConfigError(path, "amplitudes not normalized, |x|^2 + |y|^2 - 1 = " + format_double(residual));
    }
}

SpinBathModel parse_model(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"a", "b", "spins"}, path);
    const cplx a = as_complex(require(j, "a", path), child(path, "a"));
    const cplx b = as_complex(require(j, "b", path), child(path, "b"));
    check_normalized(a, b, child(path, "b"));
    const json& spins_json = require(j, "spins", path);
    const std::string spins_path = child(path, "spins");
    if (!spins_json.is_array()) throw ConfigError(spins_path, "expected an array of spins");
    if (spins_json.empty()) throw ConfigError(spins_path, "at least one environment spin is required");
    std::vector<EnvironmentSpin> spins;
    for (std::size_t i = 0; i < spins_json.size(); ++i) {
        const std::string sp = element(spins_path, i);
        const json& s = spins_json[i];
        require_object(s, sp);
        reject_unknown(s, {"alpha", "beta", "g"}, sp);
        EnvironmentSpin spin{};
        spin.alpha = as_complex(require(s, "alpha", sp), child(sp, "alpha"));
        spin.beta = as_complex(require(s, "beta", sp), child(sp, "beta"));
        spin.g = as_number(require(s, "g", sp), child(sp, "g"));
        check_normalized(spin.alpha, spin.beta, child(sp, "beta"));
        if (spin.g == 0.0) throw ConfigError(child(sp, "g"), "coupling must be nonzero");
        spins.push_back(spin);
    }
    return SpinBathModel(a, b, std::move(spins));
}

RandomSource parse_random(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"n", "seed", "coupling", "phase", "population"}, path);
    RandomSource src;
    src.n = as_unsigned(require(j, "n", path), child(path, "n"));
    if (src.n == 0) throw ConfigError(child(path, "n"), "must be at least 1");
    src.seed = as_unsigned(require(j, "seed", path), child(path, "seed"));
    if (const auto it = j.find("coupling"); it != j.end()) {
        const std::string cp = child(path, "coupling");
        require_object(*it, cp);
        const std::string law = as_string(require(*it, "law", cp), child(cp, "law"));
        if (law == "uniform_positive") {
            reject_unknown(*it, {"law", "g_max"}, cp);
            UniformPositive u;
            if (it->contains("g_max")) u.g_max = as_number((*it)["g_max"], child(cp, "g_max"));
            if (!(u.g_max > 0.0)) throw ConfigError(child(cp, "g_max"), "must be positive");
            src.coupling = u;
        } else if (law == "equal") {
            reject_unknown(*it, {"law", "g"}, cp);
            EqualCoupling e{as_number(require(*it, "g", cp), child(cp, "g"))};
            if (e.g == 0.0) throw ConfigError(child(cp, "g"), "must be nonzero");
            src.coupling = e;
        } else {
            throw ConfigError(child(cp, "law"), "expected \"uniform_positive\" or \"equal\"");
        }
    }
    if (const auto it = j.find("phase"); it != j.end()) {
        const std::string phase = as_string(*it, child(path, "phase"));
        if (phase == "zero") {
            src.phase = PhaseLaw::Zero;
        } else if (phase == "uniform") {
            src.phase = PhaseLaw::Uniform;
        } else {
            throw ConfigError(child(path, "phase"), "expected \"zero\" or \"uniform\"");
        }
    }
    if (const auto it = j.find("population"); it != j.end()) {
        const std::string pp = child(path, "population");
        if (!it->is_array() || it->size() != 2) throw ConfigError(pp, "expected [lo, hi]");
        src.population = {as_number((*it)[0], element(pp, 0)), as_number((*it)[1], element(pp, 1))};
        if (!(0.0 <= src.population.lo && src.population.lo <= src.population.hi && src.population.hi <= 1.0)) {
            throw ConfigError(pp, "need 0 <= lo <= hi <= 1");
        }
    }
    return src;
}

void parse_verdict(const json& j, const std::string& path, lemma::VerdictConfig& v) {
    require_object(j, path);
    reject_unknown(j,
                   {"n_min", "cv_max", "ks_max", "eps_global", "eps_group", "g_groups", "q_max", "rel_tolerance",
                    "omega_tolerance", "enumeration_cap", "large_bath", "sample_size", "sample_seed"},
                   path);
    auto number = [&](const char* key, double& out) {
        if (const auto it = j.find(key); it != j.end()) {
            if (it->is_null()) {
                out = std::numeric_limits<double>::infinity();
            } else {
                out = as_number(*it, child(path, key));
                if (out < 0.0) throw ConfigError(child(path, key), "must be non-negative");
            }
        }
    };
    auto count = [&](const char* key, auto& out) {
        if (const auto it = j.find(key); it != j.end()) out = as_unsigned(*it, child(path, key));
    };
    count("n_min", v.qc.n_min);
    number("cv_max", v.qc.cv_max);
    number("ks_max", v.qc.ks_max);
    number("eps_global", v.l1.eps_global);
    number("eps_group", v.l1.eps_group);
    count("g_groups", v.g_groups);
    count("q_max", v.recurrence.q_max);
    number("rel_tolerance", v.recurrence.rel_tolerance);
    number("omega_tolerance", v.omega_tolerance);
    count("enumeration_cap", v.enumeration_cap);
    count("sample_size", v.sample_size);
    count("sample_seed", v.sample_seed);
    if (const auto it = j.find("large_bath"); it != j.end()) {
        const std::string route = as_string(*it, child(path, "large_bath"));
        if (route == "sampled") {
            v.large_bath = lemma::LargeBathRoute::Sampled;
        } else if (route == "fail") {
            v.large_bath = lemma::LargeBathRoute::Fail;
        } else {
            throw ConfigError(child(path, "large_bath"), "expected \"sampled\" or \"fail\"");
        }
    }
}

json parse_document(const std::string& text, const std::string& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

OutputFormat resolve_format(const OutputSpec& spec, OutputFormat fallback) { return spec.format.value_or(fallback); }

void emit(const OutputSpec& spec, const std::string& content) {
    if (!spec.path.empty()) write_atomically(spec.path, content);
}

}  // namespace

// ---------------------------------------------------------------------------
// Documents

SpinBathModel ExperimentConfig::build_model() const {
    if (const auto* model = std::get_if<SpinBathModel>(&model_source)) return *model;
    const auto& src = std::get<RandomSource>(model_source);
    if (src.n == 0) throw ConfigError("random.n", "must be at least 1");
    try {
        return generate_random(src.n, src.seed, src.coupling, src.phase, src.population);
    } catch (const InvalidParameterError& e) {
        throw ConfigError("random", e.what());
    }
}

TimeGrid ExperimentConfig::resolved_grid(const SpinBathModel& model) const {
    if (time_grid) return *time_grid;
    return {0.0, kDefaultGridSpan / model.mean_abs_coupling(), kDefaultGridSteps};
}

ExperimentConfig parse_config(const std::string& json_text) {
    const json doc = parse_document(json_text, "(document)");
    require_object(doc, "(document)");
    reject_unknown(doc, {"model", "random", "time_grid", "observable", "verdict", "output"}, "");

    ExperimentConfig config;
    const bool has_model = doc.contains("model");
    const bool has_random = doc.contains("random");
    if (has_model == has_random) throw ConfigError("model", "exactly one of \"model\" or \"random\" is required");
    if (has_model) {
        config.model_source = parse_model(doc["model"], "model");
    } else {
        config.model_source = parse_random(doc["random"], "random");
    }

    if (const auto it = doc.find("time_grid"); it != doc.end()) {
        require_object(*it, "time_grid");
        reject_unknown(*it, {"t_start", "t_end", "steps"}, "time_grid");
        TimeGrid grid;
        if (it->contains("t_start")) grid.t_start = as_number((*it)["t_start"], "time_grid.t_start");
        grid.t_end = as_number(require(*it, "t_end", "time_grid"), "time_grid.t_end");
        if (it->contains("steps")) grid.steps = as_unsigned((*it)["steps"], "time_grid.steps");
        if (!(grid.t_start < grid.t_end)) throw ConfigError("time_grid.t_end", "must exceed t_start");
        if (grid.steps < 2) throw ConfigError("time_grid.steps", "must be at least 2");
        config.time_grid = grid;
    }

    if (const auto it = doc.find("observable"); it != doc.end()) {
        require_object(*it, "observable");
        reject_unknown(*it, {"s_uu", "s_dd", "s_du"}, "observable");
        RelevantObservable obs;
        obs.s_uu = as_number(require(*it, "s_uu", "observable"), "observable.s_uu");
        obs.s_dd = as_number(require(*it, "s_dd", "observable"), "observable.s_dd");
        obs.s_du = as_complex(require(*it, "s_du", "observable"), "observable.s_du");
        config.observable = obs;
    }

    if (const auto it = doc.find("verdict"); it != doc.end()) parse_verdict(*it, "verdict", config.verdict);

    if (const auto it = doc.find("output"); it != doc.end()) {
        require_object(*it, "output");
        reject_unknown(*it, {"format", "path"}, "output");
        if (it->contains("format")) {
            const std::string f = as_string((*it)["format"], "output.format");
            if (f == "csv") {
                config.output.format = OutputFormat::Csv;
            } else if (f == "json") {
                config.output.format = OutputFormat::Json;
            } else {
                throw ConfigError("output.format", "expected \"csv\" or \"json\"");
            }
        }
        if (it->contains("path")) config.output.path = as_string((*it)["path"], "output.path");
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string model_to_json(const SpinBathModel& model) {
    JsonWriter w;
    write_model(w, model);
    return w.str();
}

SpinBathModel model_from_json(const std::string& json_text, const std::string& root) {
    return parse_model(parse_document(json_text, root), root);
}

SpinBathModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path), "model"); }

std::string observable_to_json(const FullObservable& obs) {
    JsonWriter w;
    w.begin_object();
    w.key("s_uu").number(obs.system_part.s_uu);
    w.key("s_dd").number(obs.system_part.s_dd);
    w.key("s_du").complex(obs.system_part.s_du);
    w.key("env_parts").begin_array();
    for (const auto& e : obs.env_parts) {
        w.begin_object();
        w.key("e_uu").number(e.e_uu);
        w.key("e_dd").number(e.e_dd);
        w.key("e_du").complex(e.e_du);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string series_to_csv(const evolution::TimeSeries& series) {
    std::string out = "t,re_r,im_r,r_sq,expectation\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const cplx r = series.r_values[k];
        out += format_double(series.times[k]);
        out += ',';
        out += format_double(r.real());
        out += ',';
        out += format_double(r.imag());
        out += ',';
        out += format_double(std::norm(r));
        out += ',';
        if (series.expectation_values) out += format_double((*series.expectation_values)[k]);
        out += '\n';
    }
    return out;
}

std::string series_to_json(const evolution::TimeSeries& series) {
    std::vector<double> re, im;
    for (const auto& r : series.r_values) {
        re.push_back(r.real());
        im.push_back(r.imag());
    }
    JsonWriter w;
    w.begin_object();
    w.key("t").numbers(series.times);
    w.key("re_r").numbers(re);
    w.key("im_r").numbers(im);
    w.key("r_sq").numbers(series.r_squared());
    if (series.expectation_values) {
        w.key("expectation").numbers(*series.expectation_values);
    } else {
        w.key("expectation").null();
    }
    w.end_object();
    return w.str();
}

std::string spectrum_to_csv(const spectrum::SpectralDecomposition& dec) {
    std::string out = "omega,weight,multiplicity\n";
    for (const auto& line : dec.lines) {
        out += format_double(line.omega);
        out += ',';
        out += format_double(line.weight);
        out += ',';
        out += std::to_string(line.multiplicity);
        out += '\n';
    }
    return out;
}

std::string report_to_json(const lemma::LemmaReport& report, const lemma::VerdictConfig& config) {
    JsonWriter w;
    write_report(w, report, config);
    return w.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

// ---------------------------------------------------------------------------
// Pipelines

evolution::TimeSeries run_simulate(const ExperimentConfig& config) {
    const SpinBathModel model = config.build_model();
    const TimeGrid grid = config.resolved_grid(model);
    const RelevantObservable obs = config.observable.value_or(RelevantObservable::sigma_x());
    auto series = evolution::sample_series(model, grid.t_start, grid.t_end, grid.steps, obs);
    if (!config.output.path.empty()) {
        const bool csv = resolve_format(config.output, OutputFormat::Csv) == OutputFormat::Csv;
        emit(config.output, csv ? series_to_csv(series) : series_to_json(series));
    }
    return series;
}

lemma::LemmaReport run_predict(const ExperimentConfig& config) {
    if (resolve_format(config.output, OutputFormat::Json) != OutputFormat::Json) {
        throw ConfigError("output.format", "predict emits JSON only");
    }
    const SpinBathModel model = config.build_model();
    auto report = lemma::decoherence_verdict(model, config.verdict);
    emit(config.output, report_to_json(report, config.verdict));
    return report;
}

DecayStats decay_statistics(const SpinBathModel& model, const evolution::TimeSeries& series, double max_weight) {
    DecayStats stats;
    const auto r_sq = series.r_squared();
    stats.lower_bound = evolution::r_bounds(model).lower;
    stats.min_r_squared = r_sq.empty() ? 1.0 : *std::min_element(r_sq.begin(), r_sq.end());
    const std::size_t half = r_sq.size() / 2;
    double sum = 0.0;
    for (std::size_t k = half; k < r_sq.size(); ++k) sum += r_sq[k];
    stats.mean_r_squared_last_half = r_sq.size() > half ? sum / static_cast<double>(r_sq.size() - half) : 1.0;
    stats.consistency_bound = std::max({10.0 * stats.lower_bound, 10.0 * max_weight, 1e-4});
    return stats;
}

ComparisonReport compare(const SpinBathModel& model, const TimeGrid& grid, const lemma::VerdictConfig& config) {
    ComparisonReport report;
    report.verdict = lemma::decoherence_verdict(model, config);
    const auto series = evolution::sample_series(model, grid.t_start, grid.t_end, grid.steps);
    report.decay = decay_statistics(model, series, report.verdict.l1_max_weight);
    if (report.verdict.verdict == lemma::Verdict::NoVerdict) {
        report.agreement = Agreement::Consistent;
        report.description = "no verdict: the hypotheses do not hold, so the prediction makes no claim";
    } else if (report.decay.mean_r_squared_last_half <= report.decay.consistency_bound) {
        report.agreement = Agreement::Consistent;
        report.description = "predicted decoherence; time-averaged |r|^2 over the last half of the grid is " +
                             format_double(report.decay.mean_r_squared_last_half) + " <= bound " +
                             format_double(report.decay.consistency_bound);
    } else {
        report.agreement = Agreement::Tension;
        report.description = "predicted decoherence, but time-averaged |r|^2 over the last half of the grid is " +
                             format_double(report.decay.mean_r_squared_last_half) + " > bound " +
                             format_double(report.decay.consistency_bound);
    }
    return report;
}

ComparisonReport run_compare(const ExperimentConfig& config) {
    if (resolve_format(config.output, OutputFormat::Json) != OutputFormat::Json) {
        throw ConfigError("output.format", "compare emits JSON only");
    }
    const SpinBathModel model = config.build_model();
    auto report = compare(model, config.resolved_grid(model), config.verdict);
    emit(config.output, comparison_to_json(report, config.verdict));
    return report;
}

std::string comparison_to_json(const ComparisonReport& report, const lemma::VerdictConfig& config) {
    JsonWriter w;
    w.begin_object();
    w.key("agreement").string(to_string(report.agreement));
    w.key("description").string(report.description);
    w.key("decay_stats").begin_object();
    w.key("mean_r_sq_last_half").number(report.decay.mean_r_squared_last_half);
    w.key("min_r_sq").number(report.decay.min_r_squared);
    w.key("lower_bound").number(report.decay.lower_bound);
    w.key("consistency_bound").number(report.decay.consistency_bound);
    w.end_object();
    w.key("verdict");
    write_report(w, report.verdict, config);
    w.end_object();
    return w.str();
}

spectrum::SpectralDecomposition run_spectrum(const ExperimentConfig& config) {
    if (resolve_format(config.output, OutputFormat::Csv) != OutputFormat::Csv) {
        throw ConfigError("output.format", "spectrum emits CSV only");
    }
    const SpinBathModel model = config.build_model();
    auto dec = spectrum::spectral_decomposition(model, config.verdict.omega_tolerance, config.verdict.enumeration_cap);
    emit(config.output, spectrum_to_csv(dec));
    return dec;
}

OracleCheckSummary run_oracle_check(std::size_t n_max, std::size_t cases, std::uint64_t seed, std::ostream* log) {
    if (n_max == 0) throw ConfigError("n_max", "must be at least 1");
    if (n_max > spectrum::kDefaultOracleCap) {
        throw ConfigError("n_max", "must not exceed the oracle cap of " + std::to_string(spectrum::kDefaultOracleCap));
    }
    if (cases == 0) throw ConfigError("cases", "must be at least 1");

    OracleCheckSummary summary;
    Rng master(seed);
    for (std::size_t k = 0; k < cases; ++k) {
        const std::uint64_t case_seed = master.bits();
        Rng rng(case_seed);
        const std::size_t n = static_cast<std::size_t>(rng.integer(std::min<std::size_t>(2, n_max), n_max));
        const SpinBathModel bath = generate_random(n, rng.bits(), UniformPositive{1.0}, PhaseLaw::Uniform);
        const auto [a, b] = generate_random_amplitudes(rng);
        const SpinBathModel model(a, b, {bath.spins().begin(), bath.spins().end()});
        const FullObservable obs = generate_random_observable(n, rng);
        const double t = rng.uniform(0.0, 50.0);

        const double closed = evolution::expectation_full(model, obs, t);
        const double brute = spectrum::brute_force_expectation(model, obs, t);
        const double err = std::abs(closed - brute);
        ++summary.cases;
        summary.max_abs_error = std::max(summary.max_abs_error, err);
        if (!(err <= kOracleTolerance)) {
            ++summary.failures;
            std::ostringstream msg;
            msg << "case " << k << " failed: seed=" << seed << " case_seed=" << case_seed << " N=" << n
                << " t=" << format_double(t) << " closed_form=" << format_double(closed)
                << " brute_force=" << format_double(brute) << " |diff|=" << format_double(err) << "\nmodel: "
                << model_to_json(model) << "observable: " << observable_to_json(obs);
            if (summary.first_failure.empty()) summary.first_failure = msg.str();
            if (log) *log << msg.str();
        }
    }
    return summary;
}

const char* to_string(Agreement agreement) { return agreement == Agreement::Consistent ? "Consistent" : "Tension"; }

}  // namespace spinbath::harness
