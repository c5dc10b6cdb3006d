#include "dormantwalk/records.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace dormantwalk::records {

namespace {

constexpr int kSchemaVersion = 1;

nlohmann::json params_to_json(const ModelParams& p) {
    return {{"d", p.d},   {"kappa", p.kappa}, {"rho", p.rho},
            {"gamma", p.gamma}, {"s0", p.s0},       {"s1", p.s1}};
}

ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.d = j.at("d").get<int>();
    p.kappa = j.at("kappa").get<double>();
    p.rho = j.at("rho").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.s0 = j.at("s0").get<double>();
    p.s1 = j.at("s1").get<double>();
    return p;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = c.experiment;
    j["params"] = params_to_json(c.params);
    j["times"] = c.times;
    j["lambdas"] = c.lambdas;
    j["paths"] = c.paths;
    j["seed"] = c.seed;
    j["radius"] = c.radius;
    j["estimator"] = c.estimator;
    j["format"] = c.format;
    j["out"] = c.out;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.experiment = j.value("experiment", "");
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
    c.times = j.value("times", std::vector<double>{});
    c.lambdas = j.value("lambdas", std::vector<double>{});
    c.paths = j.value("paths", std::uint64_t{100000});
    c.seed = j.value("seed", std::uint64_t{1});
    c.radius = j.value("radius", 0);
    c.estimator = j.value("estimator", "exposure");
    c.format = j.value("format", "csv");
    c.out = j.value("out", "");
    return c;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string ExperimentConfig::to_json_text() const { return config_to_json(*this).dump(); }

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    return config_from_json(nlohmann::json::parse(text));
}

std::uint64_t ExperimentConfig::hash() const {
    const std::string dump = to_json_text();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int default_radius(const ModelParams& params) {
    if (params.d == 1) return 300;
    if (params.d == 2) return 60;
    return 25;
}

std::string ResultRecord::to_csv() const {
    std::ostringstream os;
    os << "# schema_version = " << kSchemaVersion << "\n";
    os << "# experiment = " << experiment << "\n";
    os << "# config = " << config.to_json_text() << "\n";
    os << "# config_hash = " << config_hash << "\n";
    os << "# seed = " << config.seed << "\n";
    for (const auto& [name, value] : scalars) os << "# scalar " << name << " = " << fmt_double(value) << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt_double(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string ResultRecord::to_json_text() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = experiment;
    j["timestamp"] = timestamp;
    j["config"] = config_to_json(config);
    j["config_hash"] = config_hash;
    j["columns"] = columns;
    j["rows"] = rows;
    nlohmann::json sc = nlohmann::json::object();
    for (const auto& [name, value] : scalars) sc[name] = value;
    j["scalars"] = sc;
    return j.dump(2);
}

ResultRecord ResultRecord::from_csv(const std::string& text) {
    ResultRecord rec;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            const auto eq = body.find(" = ");
            if (eq == std::string::npos) continue;
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 3);
            if (key == "experiment") rec.experiment = value;
            else if (key == "config") rec.config = ExperimentConfig::from_json_text(value);
            else if (key == "config_hash") rec.config_hash = std::stoull(value);
            else if (key.rfind("scalar ", 0) == 0)
                rec.scalars.emplace_back(key.substr(7), std::stod(value));
            continue;
        }
        std::istringstream fields(line);
        std::string field;
        if (!header_seen) {
            while (std::getline(fields, field, ',')) rec.columns.push_back(field);
            header_seen = true;
        } else {
            std::vector<double> row;
            while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
            rec.rows.push_back(std::move(row));
        }
    }
    return rec;
}

ResultRecord ResultRecord::from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ResultRecord rec;
    rec.experiment = j.value("experiment", "");
    rec.timestamp = j.value("timestamp", "");
    rec.config_hash = j.value("config_hash", std::uint64_t{0});
    if (j.contains("config")) rec.config = config_from_json(j.at("config"));
    rec.columns = j.value("columns", std::vector<std::string>{});
    rec.rows = j.value("rows", std::vector<std::vector<double>>{});
    if (j.contains("scalars"))
        for (const auto& [key, value] : j.at("scalars").items())
            rec.scalars.emplace_back(key, value.get<double>());
    return rec;
}

}  // namespace dormantwalk::records
