// SPDX-License-Identifier: Apache-2.0
#include "tscc/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tscc::harness {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad number for " + key + ": " + v);
    }
}

long long to_int(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    }
}

std::vector<double> to_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(item, key));
    return out;
}

std::vector<int> to_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<int>(to_int(item, key)));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, double>) {
            out += fmt(items[i]);
        } else if constexpr (std::is_same_v<T, std::string>) {
            out += items[i];
        } else {
            out += std::to_string(items[i]);
        }
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (dataset_kind != "synthetic" && dataset_kind != "directory") {
        throw std::invalid_argument("config: dataset kind must be synthetic or directory");
    }
    if (dataset_kind == "directory" && dataset_dir.empty()) {
        throw std::invalid_argument("config: directory dataset needs dataset.dir");
    }
    if (agent_kind != "mlp" && agent_kind != "structured") {
        throw std::invalid_argument("config: agent kind must be mlp or structured");
    }
    if (snr_grid_db.empty()) throw std::invalid_argument("config: empty SNR grid");
    for (size_t i = 1; i < snr_grid_db.size(); ++i) {
        if (!(snr_grid_db[i] > snr_grid_db[i - 1])) {
            throw std::invalid_argument("config: SNR grid must be ascending");
        }
    }
    if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
    if (methods.empty()) throw std::invalid_argument("config: need at least one method");
    for (const auto& m : methods) {
        if (m != "tscc" && m != "jscc-rec" && m != "digital") {
            throw std::invalid_argument("config: unknown method " + m);
        }
        if (m == "digital" && channel_kind != ChannelKind::Awgn) {
            throw std::invalid_argument(
                "config: the digital chain supports AWGN channels only");
        }
    }
    if (!(power > 0.0)) throw std::invalid_argument("config: power must be positive");
    if (!(task_tolerance > 0.0)) throw std::invalid_argument("config: bad tolerance");
    codec.validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config: bad section at line " +
                                            std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected key=value at line " +
                                        std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;

        if (full == "dataset.kind") cfg.dataset_kind = value;
        else if (full == "dataset.dir") cfg.dataset_dir = value;
        else if (full == "dataset.train_count") cfg.train_count = (int)to_int(value, full);
        else if (full == "dataset.eval_count") cfg.eval_count = (int)to_int(value, full);
        else if (full == "dataset.channels") cfg.scene.channels = (int)to_int(value, full);
        else if (full == "dataset.height") cfg.scene.height = (int)to_int(value, full);
        else if (full == "dataset.width") cfg.scene.width = (int)to_int(value, full);
        else if (full == "dataset.seed") cfg.scene.seed = (uint64_t)to_int(value, full);
        else if (full == "dataset.curvature_min") cfg.scene.curvature_min = to_double(value, full);
        else if (full == "dataset.curvature_max") cfg.scene.curvature_max = to_double(value, full);
        else if (full == "dataset.obstacles_min") cfg.scene.obstacles_min = (int)to_int(value, full);
        else if (full == "dataset.obstacles_max") cfg.scene.obstacles_max = (int)to_int(value, full);
        else if (full == "dataset.lighting_min") cfg.scene.lighting_min = to_double(value, full);
        else if (full == "dataset.lighting_max") cfg.scene.lighting_max = to_double(value, full);
        else if (full == "codec.latent_dim") cfg.codec.latent_dim = (int)to_int(value, full);
        else if (full == "codec.hidden") cfg.codec.hidden_dims = to_int_list(value, full);
        else if (full == "codec.beta_c_rec") cfg.codec.beta_c_rec = to_double(value, full);
        else if (full == "codec.latent_samples") cfg.codec.latent_samples = (int)to_int(value, full);
        else if (full == "codec.learning_rate") cfg.codec.learning_rate = to_double(value, full);
        else if (full == "codec.epochs") cfg.codec.epochs = (int)to_int(value, full);
        else if (full == "codec.batch_size") cfg.codec.batch_size = (int)to_int(value, full);
        else if (full == "codec.seed") cfg.codec.seed = (uint64_t)to_int(value, full);
        else if (full == "agent.kind") cfg.agent_kind = value;
        else if (full == "agent.hidden") cfg.agent_hidden = to_int_list(value, full);
        else if (full == "agent.seed") cfg.agent_seed = (uint64_t)to_int(value, full);
        else if (full == "channel.kind") {
            if (value == "awgn") cfg.channel_kind = ChannelKind::Awgn;
            else if (value == "rayleigh") cfg.channel_kind = ChannelKind::Rayleigh;
            else throw std::invalid_argument("config: channel kind must be awgn or rayleigh");
        }
        else if (full == "channel.snr_grid") cfg.snr_grid_db = to_double_list(value, full);
        else if (full == "channel.power") cfg.power = to_double(value, full);
        else if (full == "methods.list") cfg.methods = split_list(value);
        else if (full == "methods.tscc_checkpoint") cfg.tscc_checkpoint = value;
        else if (full == "methods.jscc_rec_checkpoint") cfg.jscc_rec_checkpoint = value;
        else if (full == "digital.ldpc_n") cfg.ldpc_n = (int)to_int(value, full);
        else if (full == "digital.ldpc_k") cfg.ldpc_k = (int)to_int(value, full);
        else if (full == "digital.column_weight") cfg.ldpc_column_weight = (int)to_int(value, full);
        else if (full == "digital.qam_order") cfg.qam_order = (int)to_int(value, full);
        else if (full == "digital.quality") cfg.quality_q = to_double(value, full);
        else if (full == "digital.seed") cfg.digital_seed = (uint64_t)to_int(value, full);
        else if (full == "digital.quality_grid") cfg.quality_grid = to_double_list(value, full);
        else if (full == "sweep.seeds") {
            cfg.seeds.clear();
            for (const auto& s : split_list(value)) {
                cfg.seeds.push_back((uint64_t)to_int(s, full));
            }
        }
        else if (full == "sweep.task_tolerance") cfg.task_tolerance = to_double(value, full);
        else if (full == "sweep.ratio_snr") cfg.ratio_snr_db = to_double(value, full);
        else if (full == "output.dir") cfg.output_dir = value;
        else throw std::invalid_argument("config: unknown key " + full);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[dataset]\n";
    o << "kind = " << c.dataset_kind << "\n";
    if (!c.dataset_dir.empty()) o << "dir = " << c.dataset_dir << "\n";
    o << "train_count = " << c.train_count << "\n";
    o << "eval_count = " << c.eval_count << "\n";
    o << "channels = " << c.scene.channels << "\n";
    o << "height = " << c.scene.height << "\n";
    o << "width = " << c.scene.width << "\n";
    o << "seed = " << c.scene.seed << "\n";
    o << "curvature_min = " << fmt(c.scene.curvature_min) << "\n";
    o << "curvature_max = " << fmt(c.scene.curvature_max) << "\n";
    o << "obstacles_min = " << c.scene.obstacles_min << "\n";
    o << "obstacles_max = " << c.scene.obstacles_max << "\n";
    o << "lighting_min = " << fmt(c.scene.lighting_min) << "\n";
    o << "lighting_max = " << fmt(c.scene.lighting_max) << "\n";
    o << "\n[codec]\n";
    o << "latent_dim = " << c.codec.latent_dim << "\n";
    o << "hidden = " << join(c.codec.hidden_dims) << "\n";
    o << "beta_c_rec = " << fmt(c.codec.beta_c_rec) << "\n";
    o << "latent_samples = " << c.codec.latent_samples << "\n";
    o << "learning_rate = " << fmt(c.codec.learning_rate) << "\n";
    o << "epochs = " << c.codec.epochs << "\n";
    o << "batch_size = " << c.codec.batch_size << "\n";
    o << "seed = " << c.codec.seed << "\n";
    o << "\n[agent]\n";
    o << "kind = " << c.agent_kind << "\n";
    o << "hidden = " << join(c.agent_hidden) << "\n";
    o << "seed = " << c.agent_seed << "\n";
    o << "\n[channel]\n";
    o << "kind = " << (c.channel_kind == ChannelKind::Awgn ? "awgn" : "rayleigh") << "\n";
    o << "snr_grid = " << join(c.snr_grid_db) << "\n";
    o << "power = " << fmt(c.power) << "\n";
    o << "\n[methods]\n";
    o << "list = " << join(c.methods) << "\n";
    o << "tscc_checkpoint = " << c.tscc_checkpoint << "\n";
    o << "jscc_rec_checkpoint = " << c.jscc_rec_checkpoint << "\n";
    o << "\n[digital]\n";
    o << "ldpc_n = " << c.ldpc_n << "\n";
    o << "ldpc_k = " << c.ldpc_k << "\n";
    o << "column_weight = " << c.ldpc_column_weight << "\n";
    o << "qam_order = " << c.qam_order << "\n";
    o << "quality = " << fmt(c.quality_q) << "\n";
    o << "seed = " << c.digital_seed << "\n";
    o << "quality_grid = " << join(c.quality_grid) << "\n";
    o << "\n[sweep]\n";
    {
        std::string s;
        for (size_t i = 0; i < c.seeds.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c.seeds[i]);
        }
        o << "seeds = " << s << "\n";
    }
    o << "task_tolerance = " << fmt(c.task_tolerance) << "\n";
    o << "ratio_snr = " << fmt(c.ratio_snr_db) << "\n";
    o << "\n[output]\n";
    o << "dir = " << c.output_dir << "\n";
    return o.str();
}

} // namespace tscc::harness
