use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::library::{type_path, TypeLibrary};
use super::merge::merge_node;
use super::TypeDbError;
use crate::diag::{codes, Diagnostic, DocPath};
use crate::loader::fields::Sink;
use crate::loader::{bind_appliance_node, bind_appliance_type, Node, Value};
use crate::model::{
    Appliance, ApplianceType, Categories, DistributionName, DistributionSet, Prior,
};
use crate::validate::SchemaFragment;

/// A type with its whole ancestor chain merged in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedApplianceType {
    pub name: String,
    /// Nearest ancestor first.
    pub ancestry: Vec<String>,
    /// The merged property mapping, without `parent` or `do_not_inherit`.
    pub properties: Node,
    /// `properties` bound as a type.
    #[serde(skip)]
    pub definition: ApplianceType,
}

/// An appliance joined with its type, components expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedAppliance {
    /// The instance after merging over any matching default component.
    pub appliance: Appliance,
    pub resolved_type: Arc<ResolvedApplianceType>,
    pub categories: Categories,
    pub components: Vec<ResolvedAppliance>,
    pub priors: DistributionSet,
}

impl ResolvedAppliance {
    /// The instance fields plus `ancestry`, `type_properties`, effective
    /// `categories`, expanded `components` and distance-tagged `priors`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut record = serde_json::to_value(&self.appliance).expect("appliance serializes");
        let obj = record.as_object_mut().expect("appliance is an object");
        let mut props = self.resolved_type.properties.to_json();
        if let Some(p) = props.as_object_mut() {
            p.remove("distributions");
        }
        obj.insert("ancestry".into(), json!(self.resolved_type.ancestry));
        obj.insert("type_properties".into(), props);
        obj.insert(
            "categories".into(),
            serde_json::to_value(&self.categories).expect("categories serialize"),
        );
        if self.components.is_empty() {
            obj.remove("components");
        } else {
            obj.insert(
                "components".into(),
                self.components
                    .iter()
                    .map(ResolvedAppliance::to_json)
                    .collect(),
            );
        }
        if !self.priors.is_empty() {
            let priors: serde_json::Map<_, _> = self
                .priors
                .iter()
                .map(|(k, v)| {
                    (
                        k.to_string(),
                        serde_json::to_value(v).expect("priors serialize"),
                    )
                })
                .collect();
            obj.insert("priors".into(), priors.into());
        }
        record
    }
}

fn strip(mut node: Node) -> Node {
    if let Value::Map(m) = &mut node.value {
        m.shift_remove("parent");
        m.shift_remove("do_not_inherit");
    }
    node
}

fn bind_definition(node: &Node, path: &DocPath) -> ApplianceType {
    let mut sink = Sink::default();
    bind_appliance_type(&mut sink, node, path).unwrap_or_default()
}

impl TypeLibrary {
    fn entry(&self, name: &str) -> Result<&super::library::TypeEntry, TypeDbError> {
        self.entries
            .get(name)
            .ok_or_else(|| TypeDbError::NotFound(name.to_owned()))
    }

    /// Parent chain from direct parent to root.
    pub fn ancestry(&self, name: &str) -> Result<Vec<String>, TypeDbError> {
        let mut out = Vec::new();
        let mut cur = self.entry(name)?.def.parent.clone();
        while let Some(p) = cur {
            cur = self.entry(&p)?.def.parent.clone();
            out.push(p);
        }
        Ok(out)
    }

    /// The type itself followed by its ancestors.
    fn lineage(&self, name: &str) -> Result<Vec<&ApplianceType>, TypeDbError> {
        let mut out = vec![&self.entry(name)?.def];
        for a in self.ancestry(name)? {
            out.push(&self.entry(&a)?.def);
        }
        Ok(out)
    }

    /// Memoized resolution; builds on the parent's cached result.
    pub fn resolve_type(&self, name: &str) -> Result<Arc<ResolvedApplianceType>, TypeDbError> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(name) {
            return Ok(Arc::clone(hit));
        }
        let entry = self.entry(name)?;
        let (properties, ancestry) = match &entry.def.parent {
            None => (strip(entry.raw.clone()), Vec::new()),
            Some(parent) => {
                let base = self.resolve_type(parent)?;
                let merged = merge_node(&base.properties, &entry.raw, &entry.def.do_not_inherit)
                    .map_err(|source| TypeDbError::Merge {
                        type_name: name.to_owned(),
                        source,
                    })?;
                let mut ancestry = vec![parent.clone()];
                ancestry.extend(base.ancestry.iter().cloned());
                (strip(merged), ancestry)
            }
        };
        let resolved = Arc::new(ResolvedApplianceType {
            name: name.to_owned(),
            definition: bind_definition(&properties, &type_path(name)),
            ancestry,
            properties,
        });
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(name.to_owned()).or_insert(resolved)))
    }

    /// Resolution by an explicit fold from the root, bypassing the cache.
    pub fn resolve_type_uncached(&self, name: &str) -> Result<ResolvedApplianceType, TypeDbError> {
        let ancestry = self.ancestry(name)?;
        let mut acc = Node::empty_map();
        for t in ancestry
            .iter()
            .rev()
            .chain(std::iter::once(&name.to_owned()))
        {
            let entry = self.entry(t)?;
            acc = merge_node(&acc, &entry.raw, &entry.def.do_not_inherit)
                .map(strip)
                .map_err(|source| TypeDbError::Merge {
                    type_name: t.clone(),
                    source,
                })?;
        }
        Ok(ResolvedApplianceType {
            name: name.to_owned(),
            definition: bind_definition(&acc, &type_path(name)),
            ancestry,
            properties: acc,
        })
    }

    /// The `additional_properties` of the type and its ancestors. A property
    /// declared at several levels takes the nearest declaration; a level
    /// listing `additional_properties` in `do_not_inherit` hides everything
    /// above it.
    pub fn merged_additional_schema(&self, name: &str) -> Result<SchemaFragment, TypeDbError> {
        let mut levels = Vec::new();
        for t in self.lineage(name)? {
            levels.push(&t.additional_properties);
            if t.do_not_inherit
                .iter()
                .any(|k| k == "additional_properties")
            {
                break;
            }
        }
        let mut out = SchemaFragment::default();
        for fragment in levels.into_iter().rev() {
            for (prop, rule) in &fragment.properties {
                out.properties.insert(prop.clone(), rule.clone());
            }
        }
        Ok(out)
    }

    /// Priors for one distribution down the chain, each tagged with the
    /// number of generations between the type and the declaring type.
    pub fn collect_priors(
        &self,
        name: &str,
        distribution: &str,
    ) -> Result<Vec<Prior>, TypeDbError> {
        let dist: DistributionName = distribution
            .parse()
            .map_err(|()| TypeDbError::BadDistributionName(distribution.to_owned()))?;
        self.collect_priors_of(name, dist)
    }

    pub fn collect_priors_of(
        &self,
        name: &str,
        distribution: DistributionName,
    ) -> Result<Vec<Prior>, TypeDbError> {
        let mut out = Vec::new();
        for (distance, t) in self.lineage(name)?.into_iter().enumerate() {
            for p in t.distributions.get(&distribution).into_iter().flatten() {
                out.push(Prior {
                    distance: Some(distance as u32),
                    ..p.clone()
                });
            }
            if t.do_not_inherit.iter().any(|k| k == "distributions") {
                break;
            }
        }
        Ok(out)
    }

    /// Every distribution with at least one collected prior.
    pub fn collect_all_priors(&self, name: &str) -> Result<DistributionSet, TypeDbError> {
        let mut out = DistributionSet::new();
        for &d in DistributionName::ALL {
            let priors = self.collect_priors_of(name, d)?;
            if !priors.is_empty() {
                out.insert(d, priors);
            }
        }
        Ok(out)
    }

    /// Categories of the appliance's own type, plus the set-valued terms of
    /// every component, recursively.
    pub fn effective_categories(&self, appliance: &Appliance) -> Result<Categories, TypeDbError> {
        let resolved = self.resolve_type(&appliance.type_name)?;
        let mut out = resolved.definition.categories.clone();
        for (c, _) in self.expand_components(appliance, &resolved)? {
            out.absorb_sets(&self.effective_categories(&c)?);
        }
        Ok(out)
    }

    /// Declared components laid over the type's default components. A
    /// declared component fills the first unfilled default whose type it
    /// is or inherits from; the rest are appended in declaration order.
    pub fn expand_components(
        &self,
        appliance: &Appliance,
        resolved: &ResolvedApplianceType,
    ) -> Result<Vec<(Appliance, ComponentOrigin)>, TypeDbError> {
        let defaults = &resolved.definition.components;
        let mut slots: Vec<(Appliance, ComponentOrigin)> = defaults
            .iter()
            .enumerate()
            .map(|(i, d)| (d.clone(), ComponentOrigin::Default(i)))
            .collect();
        let mut filled = vec![false; defaults.len()];
        let mut extra = Vec::new();
        for (j, c) in appliance.components.iter().enumerate() {
            let slot = (0..defaults.len())
                .find(|&i| !filled[i] && self.is_a(&c.type_name, &defaults[i].type_name));
            match slot {
                Some(i) => {
                    filled[i] = true;
                    slots[i] = (
                        self.merge_component(&defaults[i], c, &resolved.name)?,
                        ComponentOrigin::Declared(j),
                    );
                }
                None => extra.push((c.clone(), ComponentOrigin::Declared(j))),
            }
        }
        slots.extend(extra);
        Ok(slots)
    }

    fn merge_component(
        &self,
        default: &Appliance,
        declared: &Appliance,
        owner: &str,
    ) -> Result<Appliance, TypeDbError> {
        let to_node = |a: &Appliance| {
            Node::from_json(&serde_json::to_value(a).expect("appliance serializes"))
        };
        let merged = merge_node(&to_node(default), &to_node(declared), &[]).map_err(|source| {
            TypeDbError::Merge {
                type_name: owner.to_owned(),
                source,
            }
        })?;
        let mut sink = Sink::default();
        Ok(bind_appliance_node(&mut sink, &merged, &DocPath::root())
            .unwrap_or_else(|| declared.clone()))
    }

    /// Joins an appliance with its type: checks the subtype, expands and
    /// resolves components, computes categories and collects priors.
    pub fn resolve_appliance(
        &self,
        appliance: &Appliance,
        path: &DocPath,
    ) -> Result<ResolvedAppliance, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let resolved = match self.resolve_type(&appliance.type_name) {
            Ok(t) => t,
            Err(TypeDbError::NotFound(name)) => {
                return Err(vec![Diagnostic::error(
                    codes::UNKNOWN_APPLIANCE_TYPE,
                    path.join("type"),
                    format!("`{name}` is not a known appliance type"),
                )])
            }
            Err(e) => return Err(vec![e.to_diagnostic(&type_path(&appliance.type_name))]),
        };
        if let Some(st) = &appliance.subtype {
            if !resolved.definition.subtypes.contains(st) {
                let allowed = if resolved.definition.subtypes.is_empty() {
                    "none".to_owned()
                } else {
                    resolved.definition.subtypes.join(", ")
                };
                diags.push(Diagnostic::error(
                    codes::BAD_SUBTYPE,
                    path.join("subtype"),
                    format!(
                        "`{st}` is not a subtype of `{}` (allowed: {allowed})",
                        appliance.type_name
                    ),
                ));
            }
        }
        if appliance.count.is_some() && appliance.multiple.is_some() {
            diags.push(Diagnostic::error(
                codes::COUNT_AND_MULTIPLE,
                path.clone(),
                "count and multiple are mutually exclusive",
            ));
        }
        let mut categories = resolved.definition.categories.clone();
        let mut components = Vec::new();
        match self.expand_components(appliance, &resolved) {
            Ok(expanded) => {
                for (c, origin) in expanded {
                    match self.resolve_appliance(&c, &origin.path(path)) {
                        Ok(r) => {
                            categories.absorb_sets(&r.categories);
                            components.push(r);
                        }
                        Err(d) => diags.extend(d),
                    }
                }
            }
            Err(e) => diags.push(e.to_diagnostic(path)),
        }
        let priors = match self.collect_all_priors(&appliance.type_name) {
            Ok(p) => p,
            Err(e) => {
                diags.push(e.to_diagnostic(path));
                DistributionSet::new()
            }
        };
        if !diags.is_empty() {
            return Err(diags);
        }
        Ok(ResolvedAppliance {
            appliance: appliance.clone(),
            resolved_type: resolved,
            categories,
            components,
            priors,
        })
    }
}

/// Where an expanded component came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentOrigin {
    /// Position in the appliance's own `components`.
    Declared(usize),
    /// Position in the type's default components, not overridden.
    Default(usize),
}

impl ComponentOrigin {
    pub fn path(&self, appliance: &DocPath) -> DocPath {
        match self {
            ComponentOrigin::Declared(j) => appliance.join("components").join(j),
            ComponentOrigin::Default(i) => {
                appliance.join("components").join(format!("default-{i}"))
            }
        }
    }
}
