#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "ordinal/metrics.hpp"

using namespace ordinal;

namespace {

ConfusionMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    ConfusionMatrix cm(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j)
            cm.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return cm;
}

} // namespace

TEST_CASE("confusion counts land where they should") {
    std::vector<int> t = {0, 1, 2, 2};
    std::vector<int> p = {0, 1, 2, 0};
    ConfusionMatrix cm = confusion(t, p, 3);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.at(1, 1) == 1);
    CHECK(cm.at(2, 2) == 1);
    CHECK(cm.at(2, 0) == 1);
    CHECK(cm.total() == 4);
    CHECK(cm.row_sum(2) == 2);
    CHECK(cm.col_sum(0) == 2);
}

TEST_CASE("confusion of two batches adds elementwise") {
    std::vector<int> t1 = {0, 1}, p1 = {0, 2};
    std::vector<int> t2 = {1, 2}, p2 = {1, 2};
    ConfusionMatrix a = confusion(t1, p1, 3);
    const ConfusionMatrix b = confusion(t2, p2, 3);
    a.add(b);
    std::vector<int> tall = {0, 1, 1, 2}, pall = {0, 2, 1, 2};
    const ConfusionMatrix whole = confusion(tall, pall, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(a.at(i, j) == whole.at(i, j));
}

TEST_CASE("confusion rejects out-of-range labels") {
    std::vector<int> t = {0, 3}, p = {0, 1};
    CHECK_THROWS_AS(confusion(t, p, 3), std::out_of_range);
    std::vector<int> t2 = {0}, p2 = {0, 1};
    CHECK_THROWS_AS(confusion(t2, p2, 3), std::invalid_argument);
}

TEST_CASE("qwk fixtures") {
    CHECK(qwk(from_rows({{3, 0, 0}, {0, 5, 0}, {0, 0, 2}})) == doctest::Approx(1.0));
    CHECK(qwk(from_rows({{1, 0}, {0, 1}})) == doctest::Approx(1.0));
    // independent oracle on the worked 3x3 fixture
    std::vector<int> t, p;
    const std::vector<std::vector<long long>> rows = {{2, 1, 0}, {0, 2, 0}, {0, 1, 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (long long n = 0; n < rows[i][j]; ++n) {
                t.push_back(i);
                p.push_back(j);
            }
    CHECK(qwk(from_rows(rows)) ==
          doctest::Approx(oracle::qwk_direct(t, p, 3)).epsilon(1e-12));
}

TEST_CASE("qwk undefined on a single-class matrix") {
    CHECK_THROWS_AS(qwk(from_rows({{5, 0}, {0, 0}})), std::runtime_error);
}

TEST_CASE("cohen_kappa fixtures") {
    CHECK(cohen_kappa(from_rows({{4, 0}, {0, 6}})) == doctest::Approx(1.0));
    // p_o = p_e = 0.5
    CHECK(cohen_kappa(from_rows({{25, 25}, {25, 25}})) == doctest::Approx(0.0));
    // p_o = 0.7, p_e = 0.5
    CHECK(cohen_kappa(from_rows({{40, 10}, {20, 30}})) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(cohen_kappa(from_rows({{7, 0}, {0, 0}})), std::runtime_error);
}

TEST_CASE("qwk equals cohen_kappa for two classes") {
    SeededRng rng(61);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<int> t(30), p(30);
        for (int i = 0; i < 30; ++i) {
            t[i] = static_cast<int>(rng.next_below(2));
            p[i] = static_cast<int>(rng.next_below(2));
        }
        bool mixed = false;
        for (int v : t)
            mixed = mixed || v != t[0];
        if (!mixed)
            continue;  // kappa undefined
        const ConfusionMatrix cm = confusion(t, p, 2);
        CHECK(qwk(cm) == doctest::Approx(cohen_kappa(cm)).epsilon(1e-12));
    }
}

TEST_CASE("kappa and qwk ignore uniform scaling of the matrix") {
    const ConfusionMatrix cm = from_rows({{8, 2, 1}, {3, 9, 2}, {0, 4, 7}});
    ConfusionMatrix scaled(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            scaled.at(i, j) = cm.at(i, j) * 5;
    CHECK(qwk(scaled) == doctest::Approx(qwk(cm)).epsilon(1e-12));
    CHECK(cohen_kappa(scaled) == doctest::Approx(cohen_kappa(cm)).epsilon(1e-12));
}

TEST_CASE("accuracy and mae basics") {
    const ConfusionMatrix cm = from_rows({{2, 1}, {0, 3}});
    CHECK(accuracy(cm) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    std::vector<int> t = {0, 1, 2, 3};
    CHECK(mae(t, t) == 0.0);
    std::vector<int> off = {1, 2, 3, 2};  // every prediction off by one
    CHECK(mae(t, off) == doctest::Approx(1.0));
    std::vector<int> empty;
    CHECK_THROWS_AS(mae(empty, empty), std::invalid_argument);
}

TEST_CASE("macro_f1 hand fixture") {
    // class 0: precision 1, recall 1/2, f1 2/3; class 1: precision 2/3, recall 1, f1 4/5
    const ConfusionMatrix cm = from_rows({{1, 1}, {0, 2}});
    const std::vector<double> f1 = per_class_f1(cm);
    CHECK(f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f1[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(macro_f1(cm) == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0).epsilon(1e-12));
    // a class with no support and no predictions contributes zero
    const ConfusionMatrix sparse = from_rows({{3, 0, 0}, {0, 2, 0}, {0, 0, 0}});
    CHECK(per_class_f1(sparse)[2] == 0.0);
    CHECK(macro_f1(sparse) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("perfect predictions score perfectly") {
    std::vector<int> t = {0, 1, 2, 3, 1, 0};
    const ConfusionMatrix cm = confusion(t, t, 4);
    CHECK(accuracy(cm) == 1.0);
    CHECK(macro_f1(cm) == doctest::Approx(1.0));
    CHECK(qwk(cm) == doctest::Approx(1.0));
    CHECK(mae(t, t) == 0.0);
}

TEST_CASE("remission collapse blocks and preserves totals") {
    ConfusionMatrix diag(4);
    for (int i = 0; i < 4; ++i)
        diag.at(i, i) = i + 1;
    const ConfusionMatrix d2 = remission_collapse(diag);
    CHECK(d2.at(0, 0) == 3);  // 1 + 2
    CHECK(d2.at(1, 1) == 7);  // 3 + 4
    CHECK(d2.at(0, 1) == 0);
    CHECK(d2.at(1, 0) == 0);

    ConfusionMatrix single(4);
    single.at(1, 2) = 5;  // true remission predicted as non-remission
    const ConfusionMatrix s2 = remission_collapse(single);
    CHECK(s2.at(0, 1) == 5);
    CHECK(s2.total() == 5);

    SeededRng rng(62);
    ConfusionMatrix random(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            random.at(i, j) = static_cast<long long>(rng.next_below(9));
    CHECK(remission_collapse(random).total() == random.total());

    CHECK_THROWS_AS(remission_collapse(ConfusionMatrix(3)), std::invalid_argument);
}

TEST_CASE("roc_auc fixtures") {
    std::vector<double> sep = {0.9, 0.8, 0.2, 0.1};
    std::vector<int> lab = {1, 1, 0, 0};
    CHECK(roc_auc(sep, lab).auc == doctest::Approx(1.0));
    std::vector<double> anti = {0.1, 0.2, 0.8, 0.9};
    CHECK(roc_auc(anti, lab).auc == doctest::Approx(0.0));
    // pos {0.9, 0.4}, neg {0.6, 0.1}: 3 of 4 pairs concordant
    std::vector<double> mixed = {0.9, 0.4, 0.6, 0.1};
    CHECK(roc_auc(mixed, lab).auc == doctest::Approx(0.75));
}

TEST_CASE("roc_auc needs both classes") {
    std::vector<double> s = {0.5, 0.7};
    std::vector<int> ones = {1, 1};
    CHECK_THROWS_AS(roc_auc(s, ones), std::runtime_error);
    std::vector<int> zeros = {0, 0};
    CHECK_THROWS_AS(roc_auc(s, zeros), std::runtime_error);
}

TEST_CASE("roc curve starts at the origin and ends at one-one") {
    std::vector<double> s = {0.9, 0.3, 0.6, 0.2, 0.6};
    std::vector<int> l = {1, 0, 1, 0, 0};
    const RocCurve curve = roc_auc(s, l);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == doctest::Approx(1.0));
    CHECK(curve.points.back().tpr == doctest::Approx(1.0));
    // fpr and tpr never decrease along the curve
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
        CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
    }
}

TEST_CASE("auc flips under score negation without cross-class ties") {
    SeededRng rng(63);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 12;
        std::vector<double> s(n);
        std::vector<int> l(n);
        for (int i = 0; i < n; ++i) {
            s[i] = rng.next_double();
            l[i] = static_cast<int>(rng.next_below(2));
        }
        l[0] = 1;
        l[1] = 0;  // force both classes
        std::vector<double> flipped(n);
        for (int i = 0; i < n; ++i)
            flipped[i] = 1.0 - s[i];
        CHECK(roc_auc(s, l).auc + roc_auc(flipped, l).auc == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("auc handles tied scores as half-wins") {
    // pairs: 0.8 beats both negatives, 0.5 ties 0.5 and beats 0.2: 3.5 of 4
    std::vector<double> s = {0.8, 0.5, 0.5, 0.2};
    std::vector<int> l = {1, 1, 0, 0};
    CHECK(roc_auc(s, l).auc == doctest::Approx(oracle::auc_pairwise(l, s)).epsilon(1e-12));
    CHECK(roc_auc(s, l).auc == doctest::Approx(0.875).epsilon(1e-12));
}

TEST_CASE("metrics agree with brute-force oracles on random instances") {
    SeededRng rng(64);
    int done = 0;
    while (done < 200) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        const int n = 5 + static_cast<int>(rng.next_below(36));
        std::vector<int> t(n), p(n);
        for (int i = 0; i < n; ++i) {
            t[i] = static_cast<int>(rng.next_below(k));
            p[i] = static_cast<int>(rng.next_below(k));
        }
        bool mixed = false;
        for (int v : t)
            mixed = mixed || v != t[0];
        if (!mixed)
            continue;  // qwk/kappa undefined on single-class truth + prediction
        const ConfusionMatrix cm = confusion(t, p, k);
        CHECK(std::fabs(qwk(cm) - oracle::qwk_direct(t, p, k)) <= 1e-9);
        CHECK(std::fabs(cohen_kappa(cm) - oracle::kappa_direct(t, p, k)) <= 1e-9);
        CHECK(std::fabs(macro_f1(cm) - oracle::macro_f1_direct(t, p, k)) <= 1e-9);
        CHECK(std::fabs(mae(t, p) - oracle::mae_direct(t, p)) <= 1e-9);

        std::vector<int> binary(n);
        for (int i = 0; i < n; ++i)
            binary[i] = t[i] == 0 ? 1 : 0;
        std::vector<double> scores(n);
        for (int i = 0; i < n; ++i)
            scores[i] = std::round(rng.next_double() * 10.0) / 10.0;  // provoke ties
        bool both = false;
        for (int i = 1; i < n; ++i)
            both = both || binary[i] != binary[0];
        if (both)
            CHECK(std::fabs(roc_auc(scores, binary).auc -
                            oracle::auc_pairwise(binary, scores)) <= 1e-9);
        ++done;
    }
}

TEST_CASE("silhouette fixtures") {
    // two tight clusters far apart: a=0, b>0 for every point
    Matrix tight(4, 2);
    tight(0, 0) = 0.0; tight(1, 0) = 0.0;
    tight(2, 0) = 9.0; tight(3, 0) = 9.0;
    std::vector<int> lab = {0, 0, 1, 1};
    CHECK(silhouette(tight, lab) == doctest::Approx(1.0));

    // 1-D points 0,1 vs 10,11: hand-computed mean of four ratios
    Matrix line(4, 1);
    line(0, 0) = 0.0; line(1, 0) = 1.0; line(2, 0) = 10.0; line(3, 0) = 11.0;
    const double s0 = (10.5 - 1.0) / 10.5;
    const double s1 = (9.5 - 1.0) / 9.5;
    const double expect = (2.0 * s0 + 2.0 * s1) / 4.0;
    CHECK(silhouette(line, lab) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(silhouette(line, lab) == doctest::Approx(0.89975).epsilon(1e-4));

    // all points identical: degenerate rule scores zero
    Matrix same(4, 2);
    CHECK(silhouette(same, lab) == 0.0);

    std::vector<int> one_cluster = {0, 0, 0, 0};
    CHECK_THROWS_AS(silhouette(tight, one_cluster), std::runtime_error);
}

TEST_CASE("silhouette matches the direct oracle on random data") {
    SeededRng rng(65);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 20;
        Matrix x(n, 3);
        std::vector<int> labels(n);
        for (int i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(rng.next_below(3));
            for (int f = 0; f < 3; ++f)
                x(i, f) = rng.uniform(-2.0, 2.0) + labels[i] * 2.0;
        }
        labels[0] = 0;
        labels[1] = 1;
        labels[2] = 2;  // keep all clusters inhabited
        CHECK(std::fabs(silhouette(x, labels) - oracle::silhouette_direct(x, labels)) <= 1e-9);
    }
}

TEST_CASE("silhouette stays in range and drops when labels are scrambled") {
    SeededRng rng(66);
    const int n = 30;
    Matrix x(n, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = i < n / 2 ? 0 : 1;
        x(i, 0) = labels[i] * 10.0 + rng.uniform(-0.5, 0.5);
        x(i, 1) = rng.uniform(-0.5, 0.5);
    }
    const double clean = silhouette(x, labels);
    CHECK(clean > 0.8);
    CHECK(clean <= 1.0);
    std::vector<int> scrambled = labels;
    for (int i = 0; i < n; i += 3)
        scrambled[i] = 1 - scrambled[i];
    const double worse = silhouette(x, scrambled);
    CHECK(worse < clean);
    CHECK(worse >= -1.0);
}

TEST_CASE("parallel silhouette is bit-identical to the serial loop") {
    SeededRng rng(67);
    const int n = 120;
    Matrix x(n, 4);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.next_below(4));
        for (int f = 0; f < 4; ++f)
            x(i, f) = rng.uniform(-3.0, 3.0) + labels[i];
    }
    for (int k = 0; k < 4; ++k)
        labels[k] = k;
    CHECK(silhouette(x, labels) == silhouette_serial(x, labels));
}
