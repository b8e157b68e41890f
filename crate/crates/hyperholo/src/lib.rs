pub mod cocycles;
pub mod contact;
pub mod error;
pub mod forms;
pub mod jet;
pub mod models;
pub mod report;
pub mod special;
pub mod symlaurent;

// Compile and run the guide's code blocks as doctests so the book cannot
// drift from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(jets_and_forms, "../../../book/src/jets-and-forms.md");
    chapter!(
        hyperkahler_models,
        "../../../book/src/hyperkahler-models.md"
    );
    chapter!(laurent_cocycles, "../../../book/src/laurent-cocycles.md");
    chapter!(
        monopoles_and_quartics,
        "../../../book/src/monopoles-and-quartics.md"
    );
    chapter!(contact_geometry, "../../../book/src/contact-geometry.md");
    chapter!(determinants, "../../../book/src/determinants.md");
    chapter!(cli, "../../../book/src/cli.md");
}
