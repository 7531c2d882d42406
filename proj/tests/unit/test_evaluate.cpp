#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/evaluate.hpp"
#include "pris/metrics.hpp"
#include "test_support.hpp"

namespace pris {
namespace {

TEST(Evaluate, OneRowPerAttackWithSharedContainerQuality) {
    auto model = make_model(testing::tiny_config(), 1);
    testing::randomize(*model.inn(), 2, 0.02);
    const auto data = testing::synthetic_dataset(3, 32, 16, Split::kTest);
    const auto attacks = parse_attack_list("identity,gauss10,jpeg80,round");
    const auto report = evaluate(EvalModels{&model, {}}, 4, attacks, data, 7);
    ASSERT_EQ(report.rows.size(), 4u);
    for (const auto& row : report.rows) {
        EXPECT_EQ(row.n_images, 3);
        EXPECT_DOUBLE_EQ(row.psnr_c, report.rows[0].psnr_c) << row.attack;
    }
    EXPECT_EQ(report.rows[1].attack, "gauss10");
}

TEST(Evaluate, Deterministic) {
    auto model = make_model(testing::tiny_config(), 1);
    testing::randomize(*model.inn(), 3, 0.02);
    const auto data = testing::synthetic_dataset(3, 32, 16, Split::kTest);
    const auto attacks = parse_attack_list("gauss10,rjpeg90");
    const auto a = evaluate(EvalModels{&model, {}}, 4, attacks, data, 7);
    const auto b = evaluate(EvalModels{&model, {}}, 4, attacks, data, 7);
    EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(Evaluate, MissingModelsAreConfigErrors) {
    auto model = make_model(testing::tiny_config(), 1);
    const auto data = testing::synthetic_dataset(2, 32, 16, Split::kTest);
    const auto attacks = parse_attack_list("gauss10");
    EXPECT_THROW(evaluate(EvalModels{&model, {}}, 3, attacks, data, 1), ConfigError);
    EXPECT_THROW(evaluate(EvalModels{&model, {}}, 1, attacks, data, 1), ConfigError);
    EXPECT_THROW(evaluate(EvalModels{}, 4, attacks, data, 1), ConfigError);
    model.clone_enhancers(kDefaultEnhancers, "gauss10");
    EXPECT_NO_THROW(evaluate(EvalModels{&model, {}}, 3, attacks, data, 1));
    EXPECT_NO_THROW(evaluate(EvalModels{nullptr, {{"gauss10", &model}}}, 2, attacks, data, 1));
}

TEST(Evaluate, ReportJsonRoundTripAndTable) {
    EvalReport r;
    r.level = 3;
    r.model_id = "abc";
    r.rows = {{"identity", kInfinitePsnr, 40.5, 2}, {"gauss10", 33.25, 28.0, 2}};
    const auto back = EvalReport::from_json(r.to_json());
    EXPECT_EQ(back.to_json(), r.to_json());
    EXPECT_EQ(back.rows[0].psnr_c, kInfinitePsnr);
    const auto table = r.to_table();
    EXPECT_NE(table.find("gauss10"), std::string::npos);
    EXPECT_NE(table.find("inf"), std::string::npos);
}

}  // namespace
}  // namespace pris
