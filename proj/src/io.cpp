#include "cadnn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cadnn {

std::uint64_t hash_bytes(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t hash_string(const std::string& s) {
  return hash_bytes(s.data(), s.size());
}

namespace {

const char* const kColumns =
    "t,x1,x2,xdot1,xdot2,e1,e2,r1,r2,u1,u2,"
    "rhat1,rhat2,fhat1,fhat2,rtilde1,rtilde2,E1,E2,acc1,acc2,"
    "f1,f2,theta_norm,theta_hash,lambda_max_gamma,lambda_min_gamma,beta,"
    "f_minus_phi_norm,phi_jac_fro,lyap_partial";

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_vec2(std::string& out, const Eigen::Vector2d& v) {
  out += ',';
  append_num(out, v(0));
  out += ',';
  append_num(out, v(1));
}

}  // namespace

std::string csv_string(const SimLog& log) {
  std::string out;
  out.reserve(log.rows.size() * 640 + 512);
  out += kColumns;
  out += '\n';
  char buf[40];
  for (const LogRow& row : log.rows) {
    append_num(out, row.t);
    append_vec2(out, row.x);
    append_vec2(out, row.xdot);
    append_vec2(out, row.e);
    append_vec2(out, row.r);
    append_vec2(out, row.u);
    append_vec2(out, row.r_hat);
    append_vec2(out, row.f_hat);
    append_vec2(out, row.r_tilde);
    append_vec2(out, row.pred_error);
    append_vec2(out, row.accumulator);
    append_vec2(out, row.f_true);
    out += ',';
    append_num(out, row.theta_norm);
    std::snprintf(buf, sizeof(buf), ",0x%016llx",
                  static_cast<unsigned long long>(row.theta_hash));
    out += buf;
    out += ',';
    append_num(out, row.lambda_max_gamma);
    out += ',';
    append_num(out, row.lambda_min_gamma);
    out += ',';
    append_num(out, row.beta);
    out += ',';
    append_num(out, row.f_minus_phi_norm);
    out += ',';
    append_num(out, row.phi_jac_fro);
    out += ',';
    append_num(out, row.lyap_partial);
    out += '\n';
  }
  return out;
}

void write_csv(const SimLog& log, const std::string& path) {
  write_text_file(path, csv_string(log));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cadnn
