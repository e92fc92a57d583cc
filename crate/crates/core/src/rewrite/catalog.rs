//! The rule listing consumed by the command line and the fuzzers.

use super::RuleId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleGroup {
    Term,
    Region,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInfo {
    pub id: RuleId,
    pub group: RuleGroup,
    /// Parameters read in each direction.
    pub params: &'static str,
    pub side_conditions: &'static str,
    /// Backward after forward restores the subject exactly, given the
    /// parameters that describe it.
    pub invertible: bool,
}

/// Every rule, in a fixed order.
pub fn rule_catalog() -> Vec<RuleInfo> {
    use RuleGroup::*;
    use RuleId::*;
    let row = |id, group, params, side_conditions, invertible| RuleInfo { id, group, params, side_conditions, invertible };
    vec![
        row(Let1Beta, Term, "backward: terms[0] = bound term", "bound term pure", false),
        row(Let1Eta, Term, "none", "none", true),
        row(Let1Op, Term, "none", "backward: body ignores the intermediate binder", true),
        row(Let1Let1, Term, "none", "backward: body ignores the first binder", true),
        row(Let1Let2, Term, "none", "backward: body ignores the pair binders", true),
        row(Let1Abort, Term, "none", "backward: body ignores the intermediate binder", true),
        row(Let1Case, Term, "none", "backward: both continuations equal and ignore the arm binder", true),
        row(Let2Pair, Term, "none", "backward: second component ignores the first binder", true),
        row(Let2Eta, Term, "none", "backward: subject of product type", true),
        row(Let2Bind, Term, "none", "backward: body ignores the intermediate binder", true),
        row(CaseInl, Term, "backward: terms[0] = right arm, tys[0] = right summand", "none", true),
        row(CaseInr, Term, "backward: terms[0] = left arm, tys[0] = left summand", "none", true),
        row(CaseEta, Term, "none", "backward: subject of sum type", true),
        row(CaseBind, Term, "none", "backward: arms ignore the intermediate binder", true),
        row(Initial, Term, "terms[0] = target", "a pure hypothesis of type 0", false),
        row(Terminal, Term, "terms[0] = target", "subject and target pure of unit type", false),
        row(InitialExpr, Term, "terms[0] = pure witness of type 0, terms[1] = target", "witness pure of type 0", false),
        row(Let1BetaR, Region, "backward: terms[0] = bound term", "bound term pure", false),
        row(Let1OpR, Region, "none", "backward: body ignores the intermediate binder", true),
        row(Let1Let1R, Region, "none", "backward: body ignores the first binder", true),
        row(Let1Let2R, Region, "none", "backward: body ignores the pair binders", true),
        row(Let1CaseR, Region, "none", "backward: both continuations equal and ignore the arm binder", true),
        row(Let1AbortR, Region, "none", "backward: body ignores the intermediate binder", true),
        row(Let2PairR, Region, "none", "backward: second component ignores the first binder", true),
        row(Let2BindR, Region, "none", "backward: body ignores the intermediate binder", true),
        row(CaseInlR, Region, "backward: regions[0] = right arm, tys[0] = right summand", "none", true),
        row(CaseInrR, Region, "backward: regions[0] = left arm, tys[0] = left summand", "none", true),
        row(CaseBindR, Region, "none", "backward: arms ignore the intermediate binder", true),
        row(CfgBeta1, Region, "backward: count = block index (optional)", "branch argument pure", true),
        row(CfgBeta2, Region, "backward: blocks = the where's blocks", "branch target not bound by the where", true),
        row(
            CfgEta,
            Region,
            "backward: blocks = the where's blocks, regions[0] = head (optional)",
            "backward: substituted head equals the subject",
            false,
        ),
        row(Codiag, Region, "none", "inner block ignores the outer parameter", false),
        row(
            Uni,
            Region,
            "forward: regions[0] = fused body t; backward: terms[0] = mediator e, regions[0] = outer body s, tys[0] = mediator type",
            "mediator pure; premise `let y = e; s = where t { l(x): br k e }` trusted or verified",
            true,
        ),
        row(
            Dinat,
            Region,
            "regions[0] = head, regions[1..] = substitution bodies, tys = their parameter types, blocks = target loop",
            "subject equals the side built from the parameters",
            true,
        ),
        row(InitialR, Region, "regions[0] = target", "a hypothesis of type 0", false),
        row(Case2Cfg, Derived, "none", "backward: blocks ignore the two local labels", true),
        row(CfgFuse1, Derived, "backward: count = number of inner blocks", "backward: outer blocks ignore the inner labels", true),
        row(
            CfgFuse2,
            Derived,
            "backward: count = number of nested blocks",
            "nested blocks ignore the enclosing parameter; backward: earlier code ignores the nested labels",
            true,
        ),
        row(PermCfg, Derived, "perm = new block i is old block perm[i]", "perm is a permutation", true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_matches_inventory() {
        let cat = rule_catalog();
        assert_eq!(cat.len(), RuleId::ALL.len());
        for (row, id) in cat.iter().zip(RuleId::ALL) {
            assert_eq!(row.id, *id);
            assert_eq!(row.group == RuleGroup::Term, id.is_term_rule());
            assert_eq!(id.name().parse::<RuleId>().unwrap(), *id);
        }
        assert!(cat.iter().any(|r| r.id == RuleId::Let1Beta));
        assert!(cat.iter().any(|r| r.id == RuleId::CfgFuse1));
        assert_eq!(cat.iter().filter(|r| r.group == RuleGroup::Term).count(), 17);
        assert_eq!(cat.iter().filter(|r| r.group == RuleGroup::Region).count(), 18);
        assert_eq!(cat.iter().filter(|r| r.group == RuleGroup::Derived).count(), 4);
    }
}
