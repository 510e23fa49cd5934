# Utils package: configuration, logging, scenario files and reports
