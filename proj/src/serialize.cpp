#include "indesign/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include "indesign/errors.hpp"

namespace indesign::io {

std::string format_double(double value) {
    char buffer[40];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading plus
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw Error("parse_double: cannot parse '" + text + "'");
    }
    return value;
}

std::string format_complex(std::complex<double> value) {
    std::string out = format_double(value.real());
    const double im = value.imag();
    if (im >= 0.0 || std::isnan(im)) {
        out += "+" + format_double(im);
    } else {
        out += format_double(im);  // sign carried by the number
    }
    out += "j";
    return out;
}

std::complex<double> parse_complex(const std::string& text) {
    if (text.empty()) throw Error("parse_complex: empty field");
    if (text.back() != 'j') return {parse_double(text), 0.0};
    const std::string body = text.substr(0, text.size() - 1);
    // Split at the last +/- that is not an exponent sign and not leading.
    for (int i = static_cast<int>(body.size()) - 1; i > 0; --i) {
        const char c = body[i];
        if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            const double re = parse_double(body.substr(0, i));
            const std::string imag_text = body.substr(i);
            const double im = imag_text == "+" ? 1.0 : imag_text == "-" ? -1.0
                                                                        : parse_double(imag_text);
            return {re, im};
        }
    }
    return {0.0, parse_double(body)};  // pure imaginary like "1.5j"
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& v) {
    auto out = open_out(path);
    out << name << "," << v.size() << "\n";
    for (int i = 0; i < v.size(); ++i) out << format_double(v[i]) << "\n";
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path, std::string* name) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw Error("vector csv: missing header in " + path.string());
    const auto header = split_csv(line);
    if (header.size() != 2) throw Error("vector csv: bad header in " + path.string());
    if (name != nullptr) *name = header[0];
    const int length = std::stoi(header[1]);
    Eigen::VectorXd v(length);
    for (int i = 0; i < length; ++i) {
        if (!std::getline(in, line)) throw Error("vector csv: truncated " + path.string());
        v[i] = parse_double(line);
    }
    return v;
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    out << name << "," << m.rows() << "," << m.cols() << "\n";
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ",";
            out << format_double(m(i, j));
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, std::string* name) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw Error("matrix csv: missing header in " + path.string());
    const auto header = split_csv(line);
    if (header.size() != 3) throw Error("matrix csv: bad header in " + path.string());
    if (name != nullptr) *name = header[0];
    const int rows = std::stoi(header[1]);
    const int cols = std::stoi(header[2]);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw Error("matrix csv: truncated " + path.string());
        const auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != cols) {
            throw Error("matrix csv: row width mismatch in " + path.string());
        }
        for (int j = 0; j < cols; ++j) m(i, j) = parse_double(fields[j]);
    }
    return m;
}

void write_complex_vector_csv(const std::filesystem::path& path, const std::string& name,
                              const Eigen::VectorXcd& v) {
    auto out = open_out(path);
    out << name << "," << v.size() << "\n";
    for (int i = 0; i < v.size(); ++i) out << format_complex(v[i]) << "\n";
}

Eigen::VectorXcd read_complex_vector_csv(const std::filesystem::path& path, std::string* name) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw Error("vector csv: missing header in " + path.string());
    const auto header = split_csv(line);
    if (header.size() != 2) throw Error("vector csv: bad header in " + path.string());
    if (name != nullptr) *name = header[0];
    const int length = std::stoi(header[1]);
    Eigen::VectorXcd v(length);
    for (int i = 0; i < length; ++i) {
        if (!std::getline(in, line)) throw Error("vector csv: truncated " + path.string());
        v[i] = parse_complex(line);
    }
    return v;
}

}  // namespace indesign::io
