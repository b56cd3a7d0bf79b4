#include "config.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "hlppl/error.hpp"
#include "hlppl/io.hpp"

namespace hlppl::cli {

const char* to_string(HorizonMode mode) noexcept {
    switch (mode) {
        case HorizonMode::score: return "score";
        case HorizonMode::baseline: return "baseline";
        case HorizonMode::forecasts: return "forecasts";
    }
    return "score";
}

HorizonMode parse_horizon_mode(const std::string& text) {
    if (text == "score") return HorizonMode::score;
    if (text == "baseline") return HorizonMode::baseline;
    if (text == "forecasts") return HorizonMode::forecasts;
    fail(ErrorKind::contract, "unknown horizon_mode '" + text + "' (score, baseline, forecasts)");
}

void RunConfig::validate() const {
    fit.validate();
    score.validate();
    strategy.validate();
    if (!(labels.tau > 0.0)) fail(ErrorKind::contract, "config: tau must be positive");
    if (labels.d_min < 1) fail(ErrorKind::contract, "config: d_min must be >= 1");
    if (rolling_window != 0 && rolling_step == 0) fail(ErrorKind::contract, "config: rolling_step must be positive");
    if (inputs.symbol.empty() || inputs.symbol.find('/') != std::string::npos) {
        fail(ErrorKind::contract, "config: symbol must be a non-empty name without '/'");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Value {
    std::string text;
    bool quoted = false;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

double as_number(const Value& v, const std::string& key) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v.text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (v.quoted || used != v.text.size()) fail(ErrorKind::contract, "config: '" + key + "' expects a number");
    return x;
}

std::size_t as_count(const Value& v, const std::string& key) {
    const double x = as_number(v, key);
    if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x))) {
        fail(ErrorKind::contract, "config: '" + key + "' expects a non-negative integer");
    }
    return static_cast<std::size_t>(x);
}

bool as_bool(const Value& v, const std::string& key) {
    if (!v.quoted && v.text == "true") return true;
    if (!v.quoted && v.text == "false") return false;
    fail(ErrorKind::contract, "config: '" + key + "' expects true or false");
}

const std::string& as_string(const Value& v, const std::string& key) {
    if (!v.quoted) fail(ErrorKind::contract, "config: '" + key + "' expects a quoted string");
    return v.text;
}

using Setter = std::function<void(RunConfig&, const Value&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"rng_seed", [](RunConfig& c, const Value& v, const std::string& k) { c.rng_seed = static_cast<std::uint64_t>(as_count(v, k)); }},
        {"inputs.prices", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.prices = as_string(v, k); }},
        {"inputs.news", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.news = as_string(v, k); }},
        {"inputs.features", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.features = as_string(v, k); }},
        {"inputs.fit", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.fit = as_string(v, k); }},
        {"inputs.scores", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.scores = as_string(v, k); }},
        {"inputs.forecasts", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.forecasts = as_string(v, k); }},
        {"inputs.symbol", [](RunConfig& c, const Value& v, const std::string& k) { c.inputs.symbol = as_string(v, k); }},
        {"fit.restarts", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.restarts = static_cast<int>(as_count(v, k)); }},
        {"fit.tc_min_offset", [](RunConfig& c, const Value& v, const std::string& k) {
             auto r = c.fit.tc_search.value_or(std::pair{1.0, 1.0});
             r.first = as_number(v, k);
             c.fit.tc_search = r;
         }},
        {"fit.tc_max_offset", [](RunConfig& c, const Value& v, const std::string& k) {
             auto r = c.fit.tc_search.value_or(std::pair{1.0, 1.0});
             r.second = as_number(v, k);
             c.fit.tc_search = r;
         }},
        {"fit.m_min", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.m_bounds.first = as_number(v, k); }},
        {"fit.m_max", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.m_bounds.second = as_number(v, k); }},
        {"fit.omega_min", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.omega_bounds.first = as_number(v, k); }},
        {"fit.omega_max", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.omega_bounds.second = as_number(v, k); }},
        {"fit.max_iterations", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.max_iterations = static_cast<int>(as_count(v, k)); }},
        {"fit.convergence_tolerance", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.convergence_tolerance = as_number(v, k); }},
        {"fit.min_window", [](RunConfig& c, const Value& v, const std::string& k) { c.fit.min_window = as_count(v, k); }},
        {"fit.rolling_window", [](RunConfig& c, const Value& v, const std::string& k) { c.rolling_window = as_count(v, k); }},
        {"fit.rolling_step", [](RunConfig& c, const Value& v, const std::string& k) { c.rolling_step = as_count(v, k); }},
        {"score.alpha1", [](RunConfig& c, const Value& v, const std::string& k) { c.score.alpha1 = as_number(v, k); }},
        {"score.alpha2", [](RunConfig& c, const Value& v, const std::string& k) { c.score.alpha2 = as_number(v, k); }},
        {"score.tau", [](RunConfig& c, const Value& v, const std::string& k) { c.labels.tau = as_number(v, k); }},
        {"score.d_min", [](RunConfig& c, const Value& v, const std::string& k) { c.labels.d_min = as_count(v, k); }},
        {"score.normalization", [](RunConfig& c, const Value& v, const std::string& k) { c.normalization = parse_normalization_mode(as_string(v, k)); }},
        {"score.sentiment_source", [](RunConfig& c, const Value& v, const std::string& k) {
             const auto& s = as_string(v, k);
             if (s == "polarity") c.sentiment_source = SentimentSource::polarity;
             else if (s == "class_net") c.sentiment_source = SentimentSource::class_net;
             else fail(ErrorKind::contract, "config: sentiment_source must be polarity or class_net");
         }},
        {"strategy.theta1", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.theta1 = as_number(v, k); }},
        {"strategy.theta2", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.theta2 = as_number(v, k); }},
        {"strategy.stop_loss", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.stop_loss = as_number(v, k); }},
        {"strategy.max_position", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.max_position = as_number(v, k); }},
        {"strategy.transaction_cost", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.transaction_cost = as_number(v, k); }},
        {"strategy.discount_rate", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.discount_rate = as_number(v, k); }},
        {"strategy.horizon", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.horizon = static_cast<int>(as_count(v, k)); }},
        {"strategy.execution", [](RunConfig& c, const Value& v, const std::string& k) { c.strategy.execution = parse_execution(as_string(v, k)); }},
        {"strategy.horizon_mode", [](RunConfig& c, const Value& v, const std::string& k) { c.horizon_mode = parse_horizon_mode(as_string(v, k)); }},
        {"strategy.strict_range", [](RunConfig& c, const Value& v, const std::string& k) { c.strict_range = as_bool(v, k); }},
        {"output.dir", [](RunConfig& c, const Value& v, const std::string& k) { c.output_dir = as_string(v, k); }},
    };
    return table;
}

Value parse_value(const std::string& raw, const std::string& where) {
    if (!raw.empty() && raw.front() == '"') {
        Value v{"", true};
        std::size_t i = 1;
        for (; i < raw.size() && raw[i] != '"'; ++i) {
            if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
            v.text.push_back(raw[i]);
        }
        if (i >= raw.size()) fail(ErrorKind::contract, where + ": unterminated string");
        const auto rest = trim(raw.substr(i + 1));
        if (!rest.empty() && rest.front() != '#') fail(ErrorKind::contract, where + ": trailing characters after string");
        return v;
    }
    const auto hash = raw.find('#');
    return {trim(raw.substr(0, hash)), false};
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig base, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto where = source + ":" + std::to_string(line_no);
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            const auto close = t.find(']');
            if (close == std::string::npos) fail(ErrorKind::contract, where + ": malformed section header");
            section = trim(t.substr(1, close - 1));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(ErrorKind::contract, where + ": expected key = value");
        const auto key = trim(t.substr(0, eq));
        const auto full = section.empty() ? key : section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) fail(ErrorKind::contract, where + ": unknown key '" + full + "'");
        it->second(base, parse_value(trim(t.substr(eq + 1)), where), full);
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    return parse_config(read_text_file(path), std::move(base), path.string());
}

std::string to_toml(const RunConfig& c) {
    std::ostringstream out;
    auto num = [](double x) { return format_number(x); };
    out << "rng_seed = " << c.rng_seed << "\n\n";
    out << "[inputs]\n"
        << "prices = " << quote(c.inputs.prices) << "\n"
        << "news = " << quote(c.inputs.news) << "\n"
        << "features = " << quote(c.inputs.features) << "\n"
        << "fit = " << quote(c.inputs.fit) << "\n"
        << "scores = " << quote(c.inputs.scores) << "\n"
        << "forecasts = " << quote(c.inputs.forecasts) << "\n"
        << "symbol = " << quote(c.inputs.symbol) << "\n\n";
    out << "[fit]\n"
        << "restarts = " << c.fit.restarts << "\n";
    if (c.fit.tc_search) {
        out << "tc_min_offset = " << num(c.fit.tc_search->first) << "\n"
            << "tc_max_offset = " << num(c.fit.tc_search->second) << "\n";
    }
    out << "m_min = " << num(c.fit.m_bounds.first) << "\n"
        << "m_max = " << num(c.fit.m_bounds.second) << "\n"
        << "omega_min = " << num(c.fit.omega_bounds.first) << "\n"
        << "omega_max = " << num(c.fit.omega_bounds.second) << "\n"
        << "max_iterations = " << c.fit.max_iterations << "\n"
        << "convergence_tolerance = " << num(c.fit.convergence_tolerance) << "\n"
        << "min_window = " << c.fit.min_window << "\n"
        << "rolling_window = " << c.rolling_window << "\n"
        << "rolling_step = " << c.rolling_step << "\n\n";
    out << "[score]\n"
        << "alpha1 = " << num(c.score.alpha1) << "\n"
        << "alpha2 = " << num(c.score.alpha2) << "\n"
        << "tau = " << num(c.labels.tau) << "\n"
        << "d_min = " << c.labels.d_min << "\n"
        << "normalization = " << quote(to_string(c.normalization)) << "\n"
        << "sentiment_source = "
        << quote(c.sentiment_source == SentimentSource::polarity ? "polarity" : "class_net") << "\n\n";
    out << "[strategy]\n"
        << "theta1 = " << num(c.strategy.theta1) << "\n"
        << "theta2 = " << num(c.strategy.theta2) << "\n"
        << "stop_loss = " << num(c.strategy.stop_loss) << "\n"
        << "max_position = " << num(c.strategy.max_position) << "\n"
        << "transaction_cost = " << num(c.strategy.transaction_cost) << "\n"
        << "discount_rate = " << num(c.strategy.discount_rate) << "\n"
        << "horizon = " << c.strategy.horizon << "\n"
        << "execution = " << quote(to_string(c.strategy.execution)) << "\n"
        << "horizon_mode = " << quote(to_string(c.horizon_mode)) << "\n"
        << "strict_range = " << (c.strict_range ? "true" : "false") << "\n\n";
    out << "[output]\n"
        << "dir = " << quote(c.output_dir) << "\n";
    return out.str();
}

}  // namespace hlppl::cli
