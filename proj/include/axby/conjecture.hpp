#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "axby/hecke.hpp"

namespace axby {

// C(X, Y) = c1 X^3 - c2 Y^3.
struct CubicForm {
    i64 c1 = 1;
    i64 c2 = 1;
    void validate() const;
    i128 operator()(i64 y1, i64 y2) const { return static_cast<i128>(c1) * y1 * y1 * y1 - static_cast<i128>(c2) * y2 * y2 * y2; }
};

// Box values b |C(y1, y2) / a| for 1 <= y1 <= B1, 1 <= y2 <= B2 with a | C and C != 0,
// in row-major order.
struct BoxValues {
    std::vector<u64> values;
    u64 zeros = 0;  // filtered points with C = 0, skipped
};
BoxValues cubic_box_values(const CubicForm& form, i64 a, double B1, double B2, i64 b = 1);

struct ConjectureReport {
    CubicForm form;
    i64 a = 1;
    i64 b = 1;
    i64 d = 0;
    i64 ell = 0;
    int chi = 0;
    double B1 = 0, B2 = 0;
    std::complex<double> sum_value;
    double trivial_bound = 0;  // number of summed points
    u64 max_divisor_count = 0;
    std::optional<double> fitted_exponent;
};

// Sum of lambda_{chi xi^l}(|C/a|) over the filtered box. Requires a nontrivial character.
ConjectureReport cubic_form_lambda_sum(const HeckeCharacter& chi, const CubicForm& form, i64 a, double B1, double B2,
                                       i64 b = 1);
// Same box and filter with arbitrary weights, trivial character allowed.
ConjectureReport cubic_form_character_sum(const HeckeCharacter& chi, const CubicForm& form, i64 a, double B1, double B2,
                                          i64 b = 1);
std::complex<double> cubic_form_weight_sum(const std::function<double(u64)>& w, const CubicForm& form, i64 a, double B1,
                                           double B2);

// sum_{c | n, c > T} (d / c).
i64 lambda_one_flat(i64 d, u64 n, double T);

struct FlatReport {
    i64 field_disc = 0;
    i64 value = 0;
    double trivial_bound = 0;
    double envelope = 0;  // B1^2 + B2^2
};
// d is any positive nonsquare; the field discriminant of Q(sqrt d) is used.
// With check_window, T must lie in [(B1 + B2)^{1 - eta}, B1 + B2].
FlatReport cubic_form_lambda_flat_sum(i64 d, const CubicForm& form, i64 a, double B1, double B2, double T,
                                      double eta = 0.1, bool check_window = true);

struct ExponentFit {
    std::vector<std::pair<double, double>> boxes;
    std::vector<double> magnitudes;  // |sum| per box
    double slope = 0;
    double epsilon = 0;  // (slope - 1) / 2
    double residual = 0;  // rms of the log-log fit
};

// Least squares of log magnitude against log(B1 + B2).
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& boxes, const std::vector<double>& magnitudes);
void check_ladder(const std::vector<std::pair<double, double>>& boxes);
std::vector<std::pair<double, double>> square_ladder(const std::vector<double>& Bs);

ExponentFit exponent_scan(const HeckeCharacter& chi, const CubicForm& form, i64 a,
                          const std::vector<std::pair<double, double>>& boxes, int threads = 1);
ExponentFit exponent_scan_weights(const std::function<double(u64)>& w, const CubicForm& form, i64 a,
                                  const std::vector<std::pair<double, double>>& boxes);
// Random +-1 weights keyed by (seed, n); magnitudes are rms over `trials` seeds.
ExponentFit random_sign_calibration(const CubicForm& form, i64 a, const std::vector<std::pair<double, double>>& boxes,
                                    int trials, u64 seed);
double random_sign(u64 seed, u64 n);

struct ScanReport {
    std::vector<ConjectureReport> boxes;
    std::optional<ExponentFit> fit;  // present with at least 4 geometric boxes
    size_t resumed = 0;
};
// Per-box sums for a nontrivial character; each finished box is written to the
// checkpoint file (if any) and reused on the next run.
ScanReport conjecture_scan(const HeckeCharacter& chi, const CubicForm& form, i64 a, i64 b,
                           const std::vector<std::pair<double, double>>& boxes, int threads = 1,
                           const std::string& checkpoint = {});
// (B1 2^i, B2 2^i) for i < steps.
std::vector<std::pair<double, double>> doubling_ladder(double B1, double B2, int steps);

// Flat key -> values store written with hexadecimal floats, so resumed runs are bit-identical.
class Checkpoint {
public:
    explicit Checkpoint(std::string path = {});
    bool enabled() const { return !path_.empty(); }
    std::optional<std::vector<double>> get(const std::string& key) const;
    void put(const std::string& key, const std::vector<double>& values);
    void flush() const;
    size_t size() const { return entries_.size(); }

private:
    std::string path_;
    std::map<std::string, std::vector<double>> entries_;
};

struct LargeSieveConfig {
    i64 N = 10;
    double B1 = 50, B2 = 50;
    i64 a = 1, b = 1;
    double ell_cap_factor = 1;
    double eta = 0.1;
    double T = 0;  // flat cut for the trivial character; 0 means B1 + B2
    double max_work = 5e9;  // character-value evaluations
    std::string checkpoint;
    int threads = 1;
};

struct PairTerm {
    i64 n1 = 0, n2 = 0;
    i64 field_disc = 0;
    int characters = 0;
    i64 ell_max = 0;
    double value = 0;
    bool resumed = false;
};

struct LargeSieveReport {
    double value = 0;
    double envelope = 0;  // N^{2 - eta} (B1 + B2)^2
    u64 terms = 0;        // (n1, n2, chi, l) cells
    std::vector<PairTerm> pairs;
};

// Odd squarefree coprime n1, n2 <= N with n1 n2 > 1, in lexicographic order.
std::vector<std::pair<i64, i64>> large_sieve_pairs(i64 N);
LargeSieveReport large_sieve_aggregate(const LargeSieveConfig& cfg);

// #{y1, y2 in (B, 2B] : n1 b y2^3 - n2 b y1^3 = a m}.
u64 upsilon_count(i64 n1, i64 n2, i64 m, double B, i64 a = 1, i64 b = 1);

}  // namespace axby
