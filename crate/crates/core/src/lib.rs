pub mod fplin;
pub mod chartio;
pub mod connect;
pub mod fpmod;
pub mod jay;
pub mod oracle;
pub mod resolve;
pub mod steenrod;
