use proptest::prelude::*;
use strata_core::model::{parse_dataset, validate, DatasetBuilder, Format, Person};
use strata_core::synth::{synth_family, GeneratorSpec};

fn label() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z ]{0,12}",
        Just("Anna \"Cools\" <van> & Co".to_string()),
        Just("Jérôme Ævarsson 卢".to_string()),
    ]
}

prop_compose! {
    fn person(i: usize)(l in label(), b in proptest::option::of(1500i32..1700), span in 0i32..90, dead in any::<bool>(),
                        attrs in proptest::collection::btree_map("[a-z]{1,6}", "[ -~]{0,8}", 0..3)) -> Person {
        let mut p = Person::new(format!("id{i}"), l).years(b, if dead { b.map(|b| b + span) } else { None });
        for (k, v) in attrs {
            p = p.attribute(k, v);
        }
        p
    }
}

fn dataset() -> impl Strategy<Value = strata_core::GraphDataset> {
    (1usize..8)
        .prop_flat_map(|n| {
            let persons: Vec<_> = (0..n).map(person).collect();
            let rels = proptest::collection::vec((0..n, 0..n, 0usize..4), 0..12);
            (persons, rels)
        })
        .prop_map(|(persons, rels)| {
            let mut b = DatasetBuilder::new().meta("title", "generated");
            let ids: Vec<String> = persons.iter().map(|p| p.id.clone()).collect();
            for p in persons {
                b = b.push_person(p);
            }
            let mut seen = std::collections::BTreeSet::new();
            for (s, t, k) in rels {
                let kind = ["parent_of", "spouse_of", "godparent_of", "apprentice_of"][k];
                if s != t && seen.insert((s, t, k)) {
                    b = b.relation(&ids[s], &ids[t], kind);
                }
            }
            b.build_unchecked()
        })
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(ds in dataset()) {
        let text = ds.to_json_string();
        let back = parse_dataset(&text, Format::Json);
        if validate(&ds).is_empty() {
            let back = back.unwrap();
            prop_assert_eq!(&back, &ds);
            prop_assert_eq!(back.to_json_string(), text);
        } else {
            prop_assert!(back.is_err());
        }
    }

    #[test]
    fn generated_families_are_chronological(seed in any::<u64>(), fam in 1usize..4, gens in 1usize..4) {
        let spec = GeneratorSpec {
            n_families: fam,
            generations: gens,
            children_mean: 2.0,
            intermarriage_rate: 0.5,
            godparent_rate: 0.3,
            seed,
        };
        let ds = synth_family(&spec).unwrap();
        prop_assert!(validate(&ds).is_empty());
        prop_assert_eq!(&ds, &synth_family(&spec).unwrap());
        for r in ds.relations().iter().filter(|r| r.kind.as_str() == "parent_of") {
            let (s, t) = (ds.person(&r.source).unwrap(), ds.person(&r.target).unwrap());
            if let (Some(a), Some(b)) = (s.birth_year, t.birth_year) {
                prop_assert!(a < b);
            }
        }
    }
}
