#include "polariton/output.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "polariton/config.hpp"
#include "polariton/errors.hpp"

namespace polariton {

std::string header_comment(const std::string& config_hash) {
    return std::string("polariton-engine ") + engine_version + " config=" + config_hash;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::string& columns,
                     const std::vector<std::string>& notes)
    : path_(path), out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path.string());
    out_ << "# " << header_comment(config_hash) << '\n';
    for (const auto& n : notes) out_ << "# " << n << '\n';
    out_ << columns << '\n';
}

void CsvWriter::row(std::initializer_list<CsvCell> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out_ << ',';
        first = false;
        if (const auto* d = std::get_if<double>(&c))
            out_ << format_number(*d);
        else if (const auto* i = std::get_if<long long>(&c))
            out_ << *i;
        else
            out_ << std::get<std::string>(c);
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw ConfigError("failed writing " + path_.string());
}

void write_json(const std::filesystem::path& path, const std::string& config_hash, nlohmann::json body) {
    body["_header"] = header_comment(config_hash);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << body.dump(2) << '\n';
    if (out.fail()) throw ConfigError("failed writing " + path.string());
}

}  // namespace polariton
