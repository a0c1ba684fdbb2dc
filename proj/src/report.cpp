#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "epidde/report.hpp"
#include "json.hpp"

namespace epidde {

namespace {
constexpr const char* kToolVersion = "epidde 0.1.0";

std::string checksum_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

std::string utc_timestamp() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ResultBundle::ResultBundle(std::string out_dir, std::string config_echo)
    : out_dir_(std::move(out_dir)), config_echo_(std::move(config_echo)) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    if (ec)
        throw ConfigError("cannot create output directory `" + out_dir_ +
                          "`: " + ec.message());
}

std::string ResultBundle::write_text(const std::string& name,
                                     const std::string& content) {
    const std::filesystem::path path =
        std::filesystem::path(out_dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("unwritable path: " + path.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw ConfigError("write failed: " + path.string());
    entries_.push_back({name, fnv1a64(content), content.size()});
    return path.string();
}

std::string ResultBundle::write_table(const std::string& name,
                                      const Table& table) {
    return write_text(name, format_csv(table));
}

std::string ResultBundle::write_svg(const std::string& name,
                                    const std::vector<Series>& series,
                                    const std::string& x_label,
                                    const std::string& y_label,
                                    const std::string& title) {
    return write_text(name, render_svg(series, x_label, y_label, title));
}

void ResultBundle::note(const std::string& line) { notes_.push_back(line); }

std::string ResultBundle::finalize() {
    nlohmann::json manifest;
    manifest["files"] = nlohmann::json::array();
    for (const auto& e : entries_) {
        manifest["files"].push_back({{"name", e.name},
                                     {"checksum_fnv1a64", checksum_hex(e.checksum)},
                                     {"bytes", e.bytes}});
    }
    manifest["provenance"] = {{"tool", kToolVersion},
                              {"timestamp_utc", utc_timestamp()},
                              {"config", config_echo_},
                              {"notes", notes_}};
    const std::filesystem::path path =
        std::filesystem::path(out_dir_) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("unwritable path: " + path.string());
    out << manifest.dump(2) << "\n";
    return path.string();
}

std::string stability_report_json(const StabilityReport& report) {
    nlohmann::json j;
    j["equilibrium"] = to_string(report.equilibrium);
    j["r0"] = report.r0;
    j["conditions"] = nlohmann::json::object();
    for (const auto& [name, value] : report.conditions)
        j["conditions"][name] = value;
    if (report.omega_star) j["omega_star"] = *report.omega_star;
    if (report.tau_star) j["tau_star"] = *report.tau_star;
    if (report.transversality) {
        j["transversality"] = {{"x", report.transversality->x},
                               {"y", report.transversality->y},
                               {"z", report.transversality->z},
                               {"holds", report.transversality->holds}};
    }
    j["verdict"] = to_string(report.verdict);
    return j.dump();
}

}  // namespace epidde
