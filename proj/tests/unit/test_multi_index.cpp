#include <doctest.h>

#include <set>
#include <vector>

#include "qsdr/multi_index.hpp"
#include "qsdr/rng.hpp"

using qsdr::MultiIndexSet;

namespace {

long long binom(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// independent oracle: enumerate every u with [u] <= k by counting in base k+1
std::set<std::vector<int>> enumerate_all(int p, int k) {
    std::set<std::vector<int>> out;
    std::vector<int> u(p, 0);
    while (true) {
        int total = 0;
        for (int v : u) total += v;
        if (total <= k) out.insert(u);
        int pos = p - 1;
        while (pos >= 0 && u[pos] == k) u[pos--] = 0;
        if (pos < 0) break;
        ++u[pos];
    }
    return out;
}

}  // namespace

TEST_CASE("multi-index set p=2 k=1 is the forced enumeration") {
    MultiIndexSet A(2, 1);
    REQUIRE(A.size() == 3);
    CHECK(A[0] == std::vector<int>{0, 0});
    CHECK(A[1] == std::vector<int>{1, 0});
    CHECK(A[2] == std::vector<int>{0, 1});
}

TEST_CASE("multi-index set p=10 k=1 has one constant plus ten linear terms") {
    MultiIndexSet A(10, 1);
    CHECK(A.size() == 11);
    CHECK(A.first_order_positions().size() == 10);
}

TEST_CASE("multi-index set p=2 k=2 matches the exhaustive oracle") {
    MultiIndexSet A(2, 2);
    CHECK(A.size() == 6);
    std::set<std::vector<int>> got(A.indices().begin(), A.indices().end());
    CHECK(got == enumerate_all(2, 2));
    CHECK(got.count({2, 0}) == 1);
    CHECK(got.count({1, 1}) == 1);
    CHECK(got.count({0, 2}) == 1);
}

TEST_CASE("cardinality equals binomial(p+k, k) and sets match the oracle") {
    for (int p = 1; p <= 5; ++p) {
        for (int k = 0; k <= 4; ++k) {
            MultiIndexSet A(p, k);
            CHECK(A.size() == binom(p + k, k));
            std::set<std::vector<int>> got(A.indices().begin(), A.indices().end());
            CHECK(got == enumerate_all(p, k));
            int first_order = 0;
            for (int i = 0; i < A.size(); ++i) {
                if (A.degree(i) == 1) ++first_order;
            }
            CHECK(first_order == (k >= 1 ? p : 0));
        }
    }
}

TEST_CASE("ordering is deterministic and starts zero then coordinates") {
    MultiIndexSet A(4, 3), B(4, 3);
    CHECK(A.indices() == B.indices());
    CHECK(A[0] == std::vector<int>(4, 0));
    const auto& pos = A.first_order_positions();
    for (int j = 0; j < 4; ++j) {
        CHECK(pos[j] == 1 + j);
        CHECK(A[pos[j]][j] == 1);
    }
}

TEST_CASE("design vector at zero displacement") {
    MultiIndexSet A(3, 1);
    Eigen::VectorXd z = qsdr::design_vector(Eigen::VectorXd::Zero(3), 0.7, A);
    CHECK(z[0] == 1.0);
    CHECK(z.tail(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("design vector (h, 2h) gives (1, 1, 2)") {
    MultiIndexSet A(2, 1);
    for (double h : {0.25, 1.0, 3.5}) {
        Eigen::VectorXd d(2);
        d << h, 2.0 * h;
        Eigen::VectorXd z = qsdr::design_vector(d, h, A);
        CHECK(z[0] == doctest::Approx(1.0));
        CHECK(z[1] == doctest::Approx(1.0));
        CHECK(z[2] == doctest::Approx(2.0));
    }
}

TEST_CASE("first-order design components are displacement over h") {
    MultiIndexSet A(3, 1);
    qsdr::CounterRng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd d(3);
        for (int j = 0; j < 3; ++j) d[j] = 2.0 * rng.next_uniform() - 1.0;
        double h = 0.1 + rng.next_uniform();
        Eigen::VectorXd z = qsdr::design_vector(d, h, A);
        CHECK(z[0] == 1.0);
        for (int j = 0; j < 3; ++j) CHECK(z[1 + j] == doctest::Approx(d[j] / h).epsilon(1e-15));
    }
}

TEST_CASE("scaled displacement reproduces pure monomials") {
    MultiIndexSet A(2, 3);
    qsdr::CounterRng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::Vector2d t(2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0);
        double h = 0.2 + rng.next_uniform();
        Eigen::VectorXd z = qsdr::design_vector(h * t, h, A);
        for (int i = 0; i < A.size(); ++i) {
            double expected = std::pow(t[0], A[i][0]) * std::pow(t[1], A[i][1]);
            CHECK(z[i] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}
