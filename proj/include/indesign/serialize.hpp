#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <string>

namespace indesign::io {

/// Shortest decimal string that parses back to the same binary64 value.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Complex values as "re+imj" / "re-imj"; pure reals keep an explicit "+0j".
std::string format_complex(std::complex<double> value);
std::complex<double> parse_complex(const std::string& text);

// CSV files carry a one-line header "name,length" (vectors) or
// "name,rows,cols" (matrices); matrix rows are comma-joined.
void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path, std::string* name = nullptr);

void write_matrix_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, std::string* name = nullptr);

void write_complex_vector_csv(const std::filesystem::path& path, const std::string& name,
                              const Eigen::VectorXcd& v);
Eigen::VectorXcd read_complex_vector_csv(const std::filesystem::path& path,
                                         std::string* name = nullptr);

}  // namespace indesign::io
