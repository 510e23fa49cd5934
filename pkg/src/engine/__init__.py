# Engine package: integration, battle driver and oracles
