// SPDX-License-Identifier: Apache-2.0

//! Prompt store compiled into the binary (`prompts/` at the crate root).

pub(super) const FILES: &[(&str, &str)] = &[
    (
        "centralization/instruction.md",
        include_str!("../../prompts/centralization/instruction.md"),
    ),
    (
        "centralization/examples/neg_owner_sets_name.json",
        include_str!("../../prompts/centralization/examples/neg_owner_sets_name.json"),
    ),
    (
        "centralization/examples/pos_owner_withdraws_all.json",
        include_str!("../../prompts/centralization/examples/pos_owner_withdraws_all.json"),
    ),
    (
        "constant_optimization/instruction.md",
        include_str!("../../prompts/constant_optimization/instruction.md"),
    ),
    (
        "constant_optimization/examples/neg_mutable_fee.json",
        include_str!("../../prompts/constant_optimization/examples/neg_mutable_fee.json"),
    ),
    (
        "constant_optimization/examples/pos_fixed_decimals_in_storage.json",
        include_str!("../../prompts/constant_optimization/examples/pos_fixed_decimals_in_storage.json"),
    ),
    (
        "division_before_multiplication/instruction.md",
        include_str!("../../prompts/division_before_multiplication/instruction.md"),
    ),
    (
        "division_before_multiplication/examples/neg_reward_multiplies_first.json",
        include_str!("../../prompts/division_before_multiplication/examples/neg_reward_multiplies_first.json"),
    ),
    (
        "division_before_multiplication/examples/pos_reward_divides_first.json",
        include_str!("../../prompts/division_before_multiplication/examples/pos_reward_divides_first.json"),
    ),
    (
        "error_message/instruction.md",
        include_str!("../../prompts/error_message/instruction.md"),
    ),
    (
        "error_message/examples/neg_require_with_reason.json",
        include_str!("../../prompts/error_message/examples/neg_require_with_reason.json"),
    ),
    (
        "error_message/examples/pos_require_without_reason.json",
        include_str!("../../prompts/error_message/examples/pos_require_without_reason.json"),
    ),
    (
        "flashloan_attack/instruction.md",
        include_str!("../../prompts/flashloan_attack/instruction.md"),
    ),
    (
        "flashloan_attack/examples/neg_oracle_price_collateral.json",
        include_str!("../../prompts/flashloan_attack/examples/neg_oracle_price_collateral.json"),
    ),
    (
        "flashloan_attack/examples/pos_spot_price_collateral.json",
        include_str!("../../prompts/flashloan_attack/examples/pos_spot_price_collateral.json"),
    ),
    (
        "input_validation/instruction.md",
        include_str!("../../prompts/input_validation/instruction.md"),
    ),
    (
        "input_validation/examples/neg_set_treasury_checked.json",
        include_str!("../../prompts/input_validation/examples/neg_set_treasury_checked.json"),
    ),
    (
        "input_validation/examples/pos_set_treasury_unchecked.json",
        include_str!("../../prompts/input_validation/examples/pos_set_treasury_unchecked.json"),
    ),
    (
        "missing_event/instruction.md",
        include_str!("../../prompts/missing_event/instruction.md"),
    ),
    (
        "missing_event/examples/neg_setfee_with_event.json",
        include_str!("../../prompts/missing_event/examples/neg_setfee_with_event.json"),
    ),
    (
        "missing_event/examples/pos_setfee_no_event.json",
        include_str!("../../prompts/missing_event/examples/pos_setfee_no_event.json"),
    ),
    (
        "redundant_statements/instruction.md",
        include_str!("../../prompts/redundant_statements/instruction.md"),
    ),
    (
        "redundant_statements/examples/neg_all_statements_used.json",
        include_str!("../../prompts/redundant_statements/examples/neg_all_statements_used.json"),
    ),
    (
        "redundant_statements/examples/pos_unused_local.json",
        include_str!("../../prompts/redundant_statements/examples/pos_unused_local.json"),
    ),
    (
        "reentrancy/instruction.md",
        include_str!("../../prompts/reentrancy/instruction.md"),
    ),
    (
        "reentrancy/examples/neg_effects_before_transfer.json",
        include_str!("../../prompts/reentrancy/examples/neg_effects_before_transfer.json"),
    ),
    (
        "reentrancy/examples/neg_guarded_by_nonreentrant.json",
        include_str!("../../prompts/reentrancy/examples/neg_guarded_by_nonreentrant.json"),
    ),
    (
        "reentrancy/examples/pos_call_then_write.json",
        include_str!("../../prompts/reentrancy/examples/pos_call_then_write.json"),
    ),
    (
        "reentrancy/examples/pos_helper_call_then_emit.json",
        include_str!("../../prompts/reentrancy/examples/pos_helper_call_then_emit.json"),
    ),
    (
        "return_value_check/instruction.md",
        include_str!("../../prompts/return_value_check/instruction.md"),
    ),
    (
        "return_value_check/examples/neg_checked_token_transfer.json",
        include_str!("../../prompts/return_value_check/examples/neg_checked_token_transfer.json"),
    ),
    (
        "return_value_check/examples/pos_bare_token_transfer.json",
        include_str!("../../prompts/return_value_check/examples/pos_bare_token_transfer.json"),
    ),
    (
        "sandwich_attack/instruction.md",
        include_str!("../../prompts/sandwich_attack/instruction.md"),
    ),
    (
        "sandwich_attack/examples/neg_swap_user_min.json",
        include_str!("../../prompts/sandwich_attack/examples/neg_swap_user_min.json"),
    ),
    (
        "sandwich_attack/examples/pos_swap_zero_min.json",
        include_str!("../../prompts/sandwich_attack/examples/pos_swap_zero_min.json"),
    ),
    (
        "too_many_digits/instruction.md",
        include_str!("../../prompts/too_many_digits/instruction.md"),
    ),
    (
        "too_many_digits/examples/neg_ether_unit.json",
        include_str!("../../prompts/too_many_digits/examples/neg_ether_unit.json"),
    ),
    (
        "too_many_digits/examples/pos_raw_wei_amount.json",
        include_str!("../../prompts/too_many_digits/examples/pos_raw_wei_amount.json"),
    ),
    (
        "weak_randomness/instruction.md",
        include_str!("../../prompts/weak_randomness/instruction.md"),
    ),
    (
        "weak_randomness/examples/neg_deadline_timestamp.json",
        include_str!("../../prompts/weak_randomness/examples/neg_deadline_timestamp.json"),
    ),
    (
        "weak_randomness/examples/pos_lottery_timestamp.json",
        include_str!("../../prompts/weak_randomness/examples/pos_lottery_timestamp.json"),
    ),
];
