#include <gtest/gtest.h>

#include "podag/errors.hpp"
#include "podag/io.hpp"
#include "podag/serialize.hpp"

using namespace podag;

TEST(Dataset, ParseCsvAndTsv) {
    const Dataset a = parse_dataset("x,y\n1,2\n3,4.5\n");
    EXPECT_EQ(a.labels(), (std::vector<std::string>{"x", "y"}));
    EXPECT_DOUBLE_EQ(a.data()(1, 1), 4.5);
    const Dataset b = parse_dataset("x\ty\r\n1\t2\r\n-3e2\t4\r\n");
    EXPECT_DOUBLE_EQ(b.data()(1, 0), -300.0);
}

TEST(Dataset, ParseErrors) {
    EXPECT_THROW(parse_dataset(""), FormatError);
    EXPECT_THROW(parse_dataset("x,y\n1\n"), FormatError);
    EXPECT_THROW(parse_dataset("x,y\n1,abc\n"), FormatError);
    EXPECT_THROW(parse_dataset("x,\n1,2\n"), FormatError);
    EXPECT_THROW(parse_dataset("x,y\n1,1e999\n"), FormatError);
}

TEST(Dataset, FormatRoundTripIsExact) {
    Eigen::MatrixXd m(2, 3);
    m << 0.1, -1.0 / 3, 1e-300, 12345.678, 2.0, -0.0;
    const Dataset d(m, {"a", "b", "c"});
    const Dataset back = parse_dataset(format_dataset(d));
    EXPECT_EQ(back.labels(), d.labels());
    EXPECT_EQ(back.data(), d.data());
}

TEST(EdgeList, RoundTrip) {
    const std::vector<std::string> labels{"a", "b", "c"};
    const Pdag p(3, {{0, 2}}, {{1, 2}});
    const std::string text = format_edge_list(p, labels);
    EXPECT_EQ(text, "a\tc\nb\tc\tu\n");
    EXPECT_EQ(parse_edge_list(text, labels), p);
}

TEST(EdgeList, Errors) {
    const std::vector<std::string> labels{"a", "b"};
    EXPECT_THROW(parse_edge_list("a\tz\n", labels), LabelMismatchError);
    EXPECT_THROW(parse_edge_list("a\n", labels), FormatError);
    EXPECT_THROW(parse_edge_list("a\tb\tx\n", labels), FormatError);
    EXPECT_THROW(parse_edge_list("a\tb\nb\ta\n", labels), FormatError);
}

TEST(Layering, RoundTripWithUnordered) {
    const std::vector<std::string> labels{"a", "b", "c", "d"};
    const PartialOrdering o(4, {{0, 1}, {3}}, {2});
    const std::string text = format_layering(o, labels);
    EXPECT_EQ(text, "a,b\nd\nunordered:c\n");
    const PartialOrdering back = parse_layering(text, labels);
    EXPECT_EQ(back.layers(), o.layers());
    EXPECT_EQ(back.unordered(), o.unordered());
}

TEST(Layering, LabelErrorsNameTheLabels) {
    const std::vector<std::string> labels{"a", "b", "c"};
    try {
        parse_layering("a,b\nzz\n", labels);
        FAIL();
    } catch (const LabelMismatchError& e) {
        EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    }
    try {
        parse_layering("a\nb\n", labels);
        FAIL();
    } catch (const LabelMismatchError& e) {
        EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
    }
    EXPECT_THROW(parse_layering("a,b\nb,c\n", labels), LabelMismatchError);
}

TEST(FormatDouble, Shortest) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1e-10), "1e-10");
    EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(SemJson, RoundTrip) {
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(3, 3);
    theta(1, 0) = 0.25;
    theta(2, 1) = -0.75;
    Eigen::VectorXd sd(3);
    sd << 1.0, 2.0, 0.5;
    const Sem sem(Dag(3, {{0, 1}, {1, 2}}, {"p", "q", "r"}), theta, sd);
    const PartialOrdering o(3, {{0}, {1, 2}});
    const Json j = sem_to_json(sem, o, 17);
    EXPECT_EQ(j["rng"], "splitmix64");
    EXPECT_EQ(j["seed"], 17);
    const auto [back, bo] = sem_from_json(Json::parse(dump(j)));
    EXPECT_EQ(back.theta(), sem.theta());
    EXPECT_EQ(back.noise_sd(), sem.noise_sd());
    EXPECT_EQ(back.dag().labels(), sem.dag().labels());
    EXPECT_EQ(bo.layers(), o.layers());
}

TEST(SemJson, SchemaErrors) {
    EXPECT_THROW(sem_from_json(Json::parse(R"({"edges": []})")), FormatError);
    EXPECT_THROW(sem_from_json(Json::parse(R"({"nodes": ["a","b"], "edges": [["a","b"]]})")),
                 FormatError);
    EXPECT_THROW(sem_from_json(Json::parse(R"({"nodes": ["a","b"], "edges": [["a","zz",1]]})")),
                 LabelMismatchError);
}

TEST(BenchmarkSpecJson, ReadsKeys) {
    const BenchmarkSpec s = benchmark_spec_from_json(Json::parse(
        R"({"n_nodes":[50,100,150],"layers":[2,5],"samples":[500],"backends":["pcor","sis","lasso"],"replicates":3,"scopes":["skeleton"]})"));
    EXPECT_EQ(s.n_nodes, (std::vector<int>{50, 100, 150}));
    EXPECT_EQ(s.backends.size(), 3u);
    EXPECT_EQ(s.replicates, 3);
    EXPECT_EQ(s.scopes, std::vector<Scope>{Scope::kSkeleton});
    EXPECT_THROW(benchmark_spec_from_json(Json::parse(R"({"backends":["nope"]})")), FormatError);
    EXPECT_THROW(benchmark_spec_from_json(Json::parse(R"({"layers":"x"})")), FormatError);
}
